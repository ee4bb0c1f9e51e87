#pragma once

// Parametrized resource and input states, ensemble assembly, and the
// text-descriptor grammar the CLI exposes.  Descriptors look like
//   family:key=value,key=value,...
// where a comma-separated value list (bell-diagonal weights, amplitude
// lists) simply continues the previous key.  Families:
//   resources: isotropic, bell-diagonal, rotated, ensemble-file, raw-file
//   inputs:    basis, plus, haar, maximally-mixed, amps, raw-file
// Complex amplitudes are written re or re:im.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qtp/linalg.hpp"
#include "qtp/types.hpp"

namespace qtp::states {

using linalg::DensityOperator;
using linalg::StateVector;
using linalg::UnitaryOperator;

// F |Φ><Φ| + (1-F)/(n²-1) (I - |Φ><Φ|); singlet fraction F by construction.
DensityOperator isotropic(int n, double f);

// Σ_st w_st |Φ_st><Φ_st|, weights indexed s*n + t.
DensityOperator bell_diagonal(int n, const RealVector& weights);

enum class Side { Left, Right };

// (W ⊗ 1) chi (W† ⊗ 1) for Left, (1 ⊗ W) chi (1 ⊗ W†) for Right.
DensityOperator rotated(const DensityOperator& chi, const UnitaryOperator& w,
                        Side side);

struct EnsembleSpec {
  struct Member {
    double weight;
    StateVector state;  // lives on n ⊗ n
  };
  std::vector<Member> members;
};

// Σ p_α |Ψ_α><Ψ_α|.  Weights must be nonnegative and sum to 1 within
// kTraceTol; member dimension must be a perfect square.
DensityOperator from_ensemble(const EnsembleSpec& spec);

// Resource from a descriptor string; see the grammar note above.
// Grammar problems raise ParseError, bad parameters raise the library's
// validation errors.
DensityOperator parse_resource_descriptor(const std::string& descriptor);

// Input state (generally mixed) from a descriptor string.
DensityOperator parse_input_descriptor(const std::string& descriptor);

// Comma list of amplitudes, each re or re:im.  No normalization here; the
// caller decides how strict to be.
Vector parse_amplitudes(const std::string& csv);

}  // namespace qtp::states
