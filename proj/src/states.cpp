#include "qtp/states.hpp"

#include <cmath>
#include <optional>

#include "qtp/json_io.hpp"
#include "qtp/weyl.hpp"

namespace qtp::states {

namespace {

constexpr std::uint64_t kRotatedStream = 0x40B3;

using KvPairs = std::vector<std::pair<std::string, std::string>>;

// key=value pairs separated by commas; a comma token without '=' continues
// the previous value (bell-diagonal:n=2,w=1,0,0,0 keeps w = "1,0,0,0").
KvPairs parse_kv(const std::string& rest) {
  KvPairs kv;
  size_t pos = 0;
  while (pos <= rest.size()) {
    const size_t comma = std::min(rest.find(',', pos), rest.size());
    const std::string token = rest.substr(pos, comma - pos);
    const size_t eq = token.find('=');
    if (eq == std::string::npos) {
      if (kv.empty())
        throw ParseError("descriptor token '" + token + "' has no key");
      kv.back().second += "," + token;
    } else {
      kv.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    }
    pos = comma + 1;
  }
  return kv;
}

std::optional<std::string> maybe_value(const KvPairs& kv,
                                       const std::string& key) {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  return std::nullopt;
}

std::string need_value(const KvPairs& kv, const std::string& key) {
  if (auto v = maybe_value(kv, key)) return *v;
  throw ParseError("descriptor is missing key '" + key + "'");
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw ParseError("");
    return v;
  } catch (...) {
    throw ParseError("expected an integer for " + what + ", got '" + s + "'");
  }
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("");
    return v;
  } catch (...) {
    throw ParseError("expected a number for " + what + ", got '" + s + "'");
  }
}

std::uint64_t parse_seed(const KvPairs& kv) {
  const auto v = maybe_value(kv, "seed");
  if (!v) return 0;
  try {
    size_t pos = 0;
    const std::uint64_t s = std::stoull(*v, &pos);
    if (pos != v->size()) throw ParseError("");
    return s;
  } catch (...) {
    throw ParseError("expected an unsigned integer seed, got '" + *v + "'");
  }
}

std::vector<double> parse_real_list(const std::string& csv,
                                    const std::string& what) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= csv.size()) {
    const size_t comma = std::min(csv.find(',', pos), csv.size());
    out.push_back(parse_real(csv.substr(pos, comma - pos), what));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

DensityOperator isotropic(int n, double f) {
  if (n < 2 || n > kMaxDim)
    throw DimensionError("isotropic family needs 2 <= n <= " +
                         std::to_string(kMaxDim));
  if (f < 0.0 || f > 1.0)
    throw ValidationError("isotropic fraction must lie in [0, 1]");
  const long d = static_cast<long>(n) * n;
  Vector phi = Vector::Zero(d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) phi(static_cast<long>(i) * n + i) = amp;
  const Matrix proj = phi * phi.adjoint();
  Matrix m = f * proj + (1.0 - f) / (d - 1.0) *
                            (Matrix::Identity(d, d) - proj);
  return DensityOperator(std::move(m), {n, n});
}

DensityOperator bell_diagonal(int n, const RealVector& weights) {
  if (n < 1 || n > kMaxDim)
    throw DimensionError("bell-diagonal dimension out of range");
  if (weights.size() != static_cast<long>(n) * n)
    throw DimensionError("bell-diagonal needs n^2 weights");
  double sum = 0.0;
  for (long i = 0; i < weights.size(); ++i) {
    if (weights(i) < -1e-12)
      throw ValidationError("bell-diagonal weights must be nonnegative");
    sum += weights(i);
  }
  if (std::abs(sum - 1.0) > kTraceTol)
    throw ValidationError("bell-diagonal weights must sum to 1");
  const weyl::WeylBasis basis = weyl::make_basis(n);
  const long d = static_cast<long>(n) * n;
  Matrix m = Matrix::Zero(d, d);
  for (long i = 0; i < d; ++i)
    m += std::max(weights(i), 0.0) *
         (basis.bells[static_cast<size_t>(i)] *
          basis.bells[static_cast<size_t>(i)].adjoint());
  return DensityOperator(std::move(m), {n, n});
}

DensityOperator rotated(const DensityOperator& chi, const UnitaryOperator& w,
                        Side side) {
  const auto& dims = chi.dims();
  if (dims.size() != 2)
    throw DimensionError("rotation needs a bipartite density operator");
  const int expect = side == Side::Left ? dims[0] : dims[1];
  if (w.dim() != expect)
    throw DimensionError("rotation dimension does not match the subsystem");
  const Matrix k =
      side == Side::Left
          ? linalg::tensor(w.mat(), Matrix::Identity(dims[1], dims[1]))
          : linalg::tensor(Matrix::Identity(dims[0], dims[0]), w.mat());
  return DensityOperator(k * chi.mat() * k.adjoint(), chi.dims());
}

DensityOperator from_ensemble(const EnsembleSpec& spec) {
  if (spec.members.empty())
    throw ValidationError("ensemble needs at least one member");
  const int d = spec.members.front().state.dim();
  const int n = static_cast<int>(std::lround(std::sqrt(double(d))));
  if (n * n != d)
    throw DimensionError("ensemble members must live on n ⊗ n");
  double sum = 0.0;
  Matrix m = Matrix::Zero(d, d);
  for (const auto& member : spec.members) {
    if (member.state.dim() != d)
      throw DimensionError("ensemble members must share one dimension");
    if (member.weight < -1e-12)
      throw ValidationError("ensemble weights must be nonnegative");
    sum += member.weight;
    m += std::max(member.weight, 0.0) *
         (member.state.vec() * member.state.vec().adjoint());
  }
  if (std::abs(sum - 1.0) > kTraceTol)
    throw ValidationError("ensemble weights must sum to 1");
  return DensityOperator(std::move(m), {n, n});
}

DensityOperator parse_resource_descriptor(const std::string& descriptor) {
  const size_t colon = descriptor.find(':');
  const std::string family = descriptor.substr(0, colon);
  const std::string rest =
      colon == std::string::npos ? "" : descriptor.substr(colon + 1);

  if (family == "isotropic") {
    const KvPairs kv = parse_kv(rest);
    return isotropic(parse_int(need_value(kv, "n"), "n"),
                     parse_real(need_value(kv, "F"), "F"));
  }
  if (family == "bell-diagonal") {
    const KvPairs kv = parse_kv(rest);
    const auto list = parse_real_list(need_value(kv, "w"), "weight");
    RealVector w(static_cast<long>(list.size()));
    for (size_t i = 0; i < list.size(); ++i)
      w(static_cast<long>(i)) = list[i];
    return bell_diagonal(parse_int(need_value(kv, "n"), "n"), w);
  }
  if (family == "rotated") {
    const KvPairs kv = parse_kv(rest);
    const int n = parse_int(need_value(kv, "n"), "n");
    const double f = parse_real(need_value(kv, "F"), "F");
    const std::string side_name =
        maybe_value(kv, "side").value_or("right");
    Side side;
    if (side_name == "left")
      side = Side::Left;
    else if (side_name == "right")
      side = Side::Right;
    else
      throw ParseError("side must be left or right, got '" + side_name + "'");
    const auto w = linalg::haar_random_unitary(
        n, linalg::derive_seed(parse_seed(kv), kRotatedStream));
    return rotated(isotropic(n, f), w, side);
  }
  if (family == "ensemble-file") {
    const KvPairs kv = parse_kv(rest);
    return from_ensemble(json_io::ensemble_from_json(
        json_io::load_json_file(need_value(kv, "path"))));
  }
  if (family == "raw-file") {
    const KvPairs kv = parse_kv(rest);
    DensityOperator op = json_io::density_from_json(
        json_io::load_json_file(need_value(kv, "path")));
    if (op.dims().size() != 2 || op.dims()[0] != op.dims()[1])
      throw DimensionError("raw resource must carry dims (n, n)");
    return op;
  }
  throw ParseError("unknown resource family '" + family + "'");
}

DensityOperator parse_input_descriptor(const std::string& descriptor) {
  const size_t colon = descriptor.find(':');
  const std::string family = descriptor.substr(0, colon);
  const std::string rest =
      colon == std::string::npos ? "" : descriptor.substr(colon + 1);

  if (family == "amps") {
    const StateVector psi = StateVector::normalized(parse_amplitudes(rest));
    return DensityOperator(psi.vec() * psi.vec().adjoint(), {psi.dim()});
  }
  if (family == "basis") {
    const KvPairs kv = parse_kv(rest);
    const int n = parse_int(need_value(kv, "n"), "n");
    const int k = parse_int(need_value(kv, "k"), "k");
    if (n < 1 || n > kMaxDim || k < 0 || k >= n)
      throw DimensionError("basis state needs 0 <= k < n <= " +
                           std::to_string(kMaxDim));
    Matrix m = Matrix::Zero(n, n);
    m(k, k) = 1.0;
    return DensityOperator(std::move(m), {n});
  }
  if (family == "plus") {
    const KvPairs kv = parse_kv(rest);
    const int n = parse_int(need_value(kv, "n"), "n");
    if (n < 1 || n > kMaxDim)
      throw DimensionError("plus state dimension out of range");
    Vector v = Vector::Constant(n, Complex(1.0 / std::sqrt(double(n)), 0.0));
    return DensityOperator(v * v.adjoint(), {n});
  }
  if (family == "haar") {
    const KvPairs kv = parse_kv(rest);
    const int n = parse_int(need_value(kv, "n"), "n");
    const Vector v = linalg::haar_random_state(n, parse_seed(kv)).vec();
    return DensityOperator(v * v.adjoint(), {n});
  }
  if (family == "maximally-mixed") {
    const KvPairs kv = parse_kv(rest);
    const int n = parse_int(need_value(kv, "n"), "n");
    if (n < 1 || n > kMaxDim)
      throw DimensionError("mixed state dimension out of range");
    return DensityOperator(Matrix::Identity(n, n) / double(n), {n});
  }
  if (family == "raw-file") {
    const KvPairs kv = parse_kv(rest);
    DensityOperator op = json_io::density_from_json(
        json_io::load_json_file(need_value(kv, "path")));
    if (op.dims().size() != 1)
      throw DimensionError("raw input must be a single-system operator");
    return op;
  }
  throw ParseError("unknown input family '" + family + "'");
}

Vector parse_amplitudes(const std::string& csv) {
  if (csv.empty()) throw ParseError("empty amplitude list");
  std::vector<Complex> amps;
  size_t pos = 0;
  while (pos <= csv.size()) {
    const size_t comma = std::min(csv.find(',', pos), csv.size());
    const std::string token = csv.substr(pos, comma - pos);
    const size_t sep = token.find(':');
    if (sep == std::string::npos) {
      amps.emplace_back(parse_real(token, "amplitude"), 0.0);
    } else {
      amps.emplace_back(parse_real(token.substr(0, sep), "amplitude"),
                        parse_real(token.substr(sep + 1), "amplitude"));
    }
    pos = comma + 1;
  }
  Vector v(static_cast<long>(amps.size()));
  for (size_t i = 0; i < amps.size(); ++i) v(static_cast<long>(i)) = amps[i];
  return v;
}

}  // namespace qtp::states
