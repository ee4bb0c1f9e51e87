#include "qtp/json_io.hpp"

#include <fstream>
#include <utility>
#include <vector>

namespace qtp::json_io {

namespace {

void require_fields(const json& j, std::initializer_list<const char*> keys,
                    const char* what) {
  if (!j.is_object())
    throw ParseError(std::string(what) + ": expected a JSON object");
  for (const char* k : keys)
    if (!j.contains(k))
      throw ParseError(std::string(what) + ": missing field '" + k + "'");
}

Matrix matrix_from_parts(long rows, long cols, const json& re,
                         const json& im, const char* what) {
  if (rows < 1 || cols < 1)
    throw ParseError(std::string(what) + ": non-positive shape");
  if (!re.is_array() || !im.is_array() ||
      re.size() != static_cast<size_t>(rows * cols) || re.size() != im.size())
    throw ParseError(std::string(what) +
                     ": re/im must be rows*cols numeric arrays");
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) {
      const size_t k = static_cast<size_t>(i * cols + j);
      if (!re[k].is_number() || !im[k].is_number())
        throw ParseError(std::string(what) + ": non-numeric entry");
      m(i, j) = Complex(re[k].get<double>(), im[k].get<double>());
    }
  return m;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"re", std::move(re)},
              {"im", std::move(im)}};
}

Matrix matrix_from_json(const json& j) {
  require_fields(j, {"rows", "cols", "re", "im"}, "matrix");
  return matrix_from_parts(j["rows"].get<long>(), j["cols"].get<long>(),
                           j["re"], j["im"], "matrix");
}

json vector_to_json(const Vector& v) {
  return matrix_to_json(Matrix(v));
}

Vector vector_from_json(const json& j) {
  const Matrix m = matrix_from_json(j);
  if (m.cols() != 1) throw ParseError("vector: expected cols = 1");
  return Vector(m.col(0));
}

json density_to_json(const linalg::DensityOperator& op) {
  json j = matrix_to_json(op.mat());
  j["dims"] = op.dims();
  return j;
}

linalg::DensityOperator density_from_json(const json& j) {
  require_fields(j, {"rows", "cols", "re", "im", "dims"}, "density operator");
  Matrix m = matrix_from_json(j);
  if (!j["dims"].is_array() || j["dims"].empty())
    throw ParseError("density operator: dims must be a non-empty array");
  std::vector<int> dims;
  for (const auto& d : j["dims"]) {
    if (!d.is_number_integer())
      throw ParseError("density operator: dims must be integers");
    dims.push_back(d.get<int>());
  }
  return linalg::DensityOperator(std::move(m), std::move(dims));
}

json ensemble_to_json(const states::EnsembleSpec& spec) {
  json members = json::array();
  for (const auto& m : spec.members)
    members.push_back(
        json{{"weight", m.weight}, {"state", vector_to_json(m.state.vec())}});
  return json{{"members", std::move(members)}};
}

states::EnsembleSpec ensemble_from_json(const json& j) {
  require_fields(j, {"members"}, "ensemble");
  if (!j["members"].is_array() || j["members"].empty())
    throw ParseError("ensemble: members must be a non-empty array");
  states::EnsembleSpec spec;
  for (const auto& m : j["members"]) {
    require_fields(m, {"weight", "state"}, "ensemble member");
    if (!m["weight"].is_number())
      throw ParseError("ensemble member: weight must be a number");
    spec.members.push_back(
        {m["weight"].get<double>(),
         linalg::StateVector(vector_from_json(m["state"]))});
  }
  return spec;
}

json phase_table_to_json(const pure::PhaseTable& c) {
  json entries = json::array();
  for (int s = 0; s < c.n1(); ++s) {
    json plane = json::array();
    for (int i = 0; i < c.n1(); ++i) {
      json row = json::array();
      for (int t = 0; t < c.n2(); ++t) {
        const Complex z = c.at(s, i, t);
        row.push_back(json::array({z.real(), z.imag()}));
      }
      plane.push_back(std::move(row));
    }
    entries.push_back(std::move(plane));
  }
  return json{{"n1", c.n1()}, {"n2", c.n2()}, {"entries", std::move(entries)}};
}

pure::PhaseTable phase_table_from_json(const json& j) {
  require_fields(j, {"n1", "n2", "entries"}, "phase table");
  const int n1 = j["n1"].get<int>(), n2 = j["n2"].get<int>();
  if (n1 < 1 || n2 < 1) throw ParseError("phase table: non-positive shape");
  const json& e = j["entries"];
  if (!e.is_array() || e.size() != static_cast<size_t>(n1))
    throw ParseError("phase table: entries must have n1 planes");
  std::vector<Complex> c;
  c.reserve(static_cast<size_t>(n1) * n1 * n2);
  for (int s = 0; s < n1; ++s) {
    if (!e[s].is_array() || e[s].size() != static_cast<size_t>(n1))
      throw ParseError("phase table: plane must have n1 rows");
    for (int i = 0; i < n1; ++i) {
      const json& row = e[s][i];
      if (!row.is_array() || row.size() != static_cast<size_t>(n2))
        throw ParseError("phase table: row must have n2 entries");
      for (int t = 0; t < n2; ++t) {
        const json& z = row[t];
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() ||
            !z[1].is_number())
          throw ParseError("phase table: entry must be [re, im]");
        c.emplace_back(z[0].get<double>(), z[1].get<double>());
      }
    }
  }
  return pure::PhaseTable(n1, n2, std::move(c));
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace qtp::json_io
