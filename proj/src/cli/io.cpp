#include "crreduce/cli/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace crreduce::cli {

namespace {

[[noreturn]] void bad_input(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) bad_input(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) bad_input("unknown field '" + key + "' in " + where);
  }
}

const json& required(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) bad_input("missing field '" + key + "' in " + where);
  return j.at(key);
}

double finite_number(const json& j, const std::string& what) {
  if (!j.is_number()) bad_input(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad_input(what + " must be finite");
  return v;
}

ToleranceOverrides tolerances_from_json(const json& j) {
  reject_unknown(j, {"tau_rank", "tau_eig", "tau_verify"}, "tolerances");
  ToleranceOverrides out;
  if (j.contains("tau_rank")) out.tau_rank = finite_number(j.at("tau_rank"), "tau_rank");
  if (j.contains("tau_eig")) out.tau_eig = finite_number(j.at("tau_eig"), "tau_eig");
  if (j.contains("tau_verify")) out.tau_verify = finite_number(j.at("tau_verify"), "tau_verify");
  return out;
}

json tolerances_to_json(const ToleranceOverrides& tol) {
  json j = json::object();
  if (tol.tau_rank) j["tau_rank"] = *tol.tau_rank;
  if (tol.tau_eig) j["tau_eig"] = *tol.tau_eig;
  if (tol.tau_verify) j["tau_verify"] = *tol.tau_verify;
  return j;
}

int positive_n(const json& j) {
  if (!j.is_number_integer()) bad_input("n must be an integer");
  const auto n = j.get<long long>();
  if (n < 1 || n > 10000) bad_input("n must be a positive integer");
  return static_cast<int>(n);
}

std::string optional_string(const json& j, const std::string& key) {
  if (!j.contains(key)) return {};
  if (!j.at(key).is_string()) bad_input(key + " must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace

void ToleranceOverrides::apply_to(Tolerances& tol) const {
  if (tau_rank) tol.tau_rank = *tau_rank;
  if (tau_eig) tol.tau_eig = *tau_eig;
  if (tau_verify) tol.tau_verify = *tau_verify;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j, Index rows, Index cols, const std::string& what) {
  std::ostringstream shape;
  shape << what << " must be a " << rows << "x" << cols << " array of arrays";
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) bad_input(shape.str());
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) bad_input(shape.str());
    for (Index k = 0; k < cols; ++k) {
      m(i, k) = finite_number(row[static_cast<std::size_t>(k)], what + " entry");
    }
  }
  return m;
}

json complex_to_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json complex_matrix_to_json(const CMat& m) {
  return json{{"re", matrix_to_json(m.real())}, {"im", matrix_to_json(m.imag())}};
}

json instance_to_json(const Instance& inst, const ToleranceOverrides& tol) {
  json j;
  j["mode"] = mode_key(inst.mode);
  j["n"] = inst.n;
  if (!inst.label.empty()) j["label"] = inst.label;
  j["omega"] = matrix_to_json(inst.omega);
  j["structure"] = matrix_to_json(inst.structure);
  const json t = tolerances_to_json(tol);
  if (!t.empty()) j["tolerances"] = t;
  return j;
}

InstanceFile instance_from_json(const json& j) {
  reject_unknown(j, {"mode", "n", "omega", "structure", "tolerances", "label"}, "instance");
  const json& mode = required(j, "mode", "instance");
  if (!mode.is_string()) bad_input("mode must be \"cr\" or \"lagrangian\"");
  InstanceFile out;
  const int n = positive_n(required(j, "n", "instance"));
  out.instance = make_instance(parse_mode(mode.get<std::string>()),
                               matrix_from_json(required(j, "omega", "instance"), 2 * n, 2 * n, "omega"),
                               matrix_from_json(required(j, "structure", "instance"), 2 * n, 2 * n, "structure"),
                               optional_string(j, "label"));
  if (j.contains("tolerances")) out.tolerances = tolerances_from_json(j.at("tolerances"));
  return out;
}

json family_to_json(const FamilyFile& fam) {
  json j;
  j["mode"] = mode_key(fam.family.mode);
  j["n"] = fam.family.n;
  if (!fam.label.empty()) j["label"] = fam.label;
  j["base"] = matrix_to_json(fam.family.base);
  j["direction"] = matrix_to_json(fam.family.direction);
  j["structure"] = matrix_to_json(fam.family.structure);
  if (fam.t_star) j["t_star"] = *fam.t_star;
  return j;
}

FamilyFile family_from_json(const json& j) {
  reject_unknown(j, {"mode", "n", "base", "direction", "structure", "t_star", "label"}, "family");
  const json& mode = required(j, "mode", "family");
  if (!mode.is_string()) bad_input("mode must be \"cr\" or \"lagrangian\"");
  FamilyFile out;
  const int n = positive_n(required(j, "n", "family"));
  out.family.mode = parse_mode(mode.get<std::string>());
  out.family.n = n;
  out.family.base = matrix_from_json(required(j, "base", "family"), 2 * n, 2 * n, "base");
  out.family.direction = matrix_from_json(required(j, "direction", "family"), 2 * n, 2 * n, "direction");
  out.family.structure = matrix_from_json(required(j, "structure", "family"), 2 * n, 2 * n, "structure");
  if (j.contains("t_star")) out.t_star = finite_number(j.at("t_star"), "t_star");
  out.label = optional_string(j, "label");
  return out;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad_input("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    bad_input(path + ": " + err.what());
  }
}

void write_json(const std::string& path, const json& j) {
  if (path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) bad_input("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) bad_input("failed writing " + path);
}

InstanceFile read_instance_file(const std::string& path) {
  try {
    return instance_from_json(read_json(path));
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::InvalidInput) throw;
    std::string what = err.what();
    if (what.rfind(path, 0) != 0) what = path + ": " + what;
    throw Error(ErrorKind::InvalidInput, what);
  }
}

FamilyFile read_family_file(const std::string& path) { return family_from_json(read_json(path)); }

Tolerances parse_tolerance_triple(const std::string& text) {
  Tolerances tol;
  std::stringstream in(text);
  std::string part;
  double* fields[] = {&tol.tau_rank, &tol.tau_eig, &tol.tau_verify};
  int count = 0;
  while (std::getline(in, part, ',')) {
    if (count == 3) bad_input("CRREDUCE_TOL has more than three entries");
    char* end = nullptr;
    const double v = std::strtod(part.c_str(), &end);
    if (part.empty() || *end != '\0' || !std::isfinite(v)) {
      bad_input("CRREDUCE_TOL entry '" + part + "' is not a number");
    }
    *fields[count++] = v;
  }
  if (count != 3) bad_input("CRREDUCE_TOL must be \"rank,eig,verify\"");
  return tol;
}

Tolerances default_tolerances() {
  const char* env = std::getenv("CRREDUCE_TOL");
  if (env == nullptr || *env == '\0') return Tolerances{};
  return parse_tolerance_triple(env);
}

Mode parse_mode(const std::string& text) {
  if (text == "cr") return Mode::CR;
  if (text == "lagrangian") return Mode::Lagrangian;
  bad_input("mode must be \"cr\" or \"lagrangian\", got \"" + text + "\"");
}

const char* mode_key(Mode mode) { return mode == Mode::CR ? "cr" : "lagrangian"; }

}  // namespace crreduce::cli
