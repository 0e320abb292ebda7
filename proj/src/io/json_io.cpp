#include "cymono/io/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cymono/rng.hpp"

namespace cymono::io {

namespace {

std::vector<double> number_array(const json& j, const char* what) {
  if (!j.is_array()) throw IoError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw IoError(std::string(what) + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ProblemInput problem_from_json(const json& j) {
  if (!j.is_object()) throw IoError("input must be a JSON object");
  if (!j.contains("dimension") || !j.contains("order") || !j.contains("points") ||
      !j.contains("fields"))
    throw IoError("input requires dimension, order, points, fields");
  const int d = j.at("dimension").get<int>();
  const int order = j.at("order").get<int>();

  const json& points = j.at("points");
  if (!points.is_array() || points.empty()) throw IoError("points must be a nonempty array");
  std::vector<double> flat;
  for (const auto& row : points) {
    const std::vector<double> p = number_array(row, "point");
    if (static_cast<int>(p.size()) != d) throw IoError("point dimension mismatch");
    flat.insert(flat.end(), p.begin(), p.end());
  }

  std::vector<double> weights;
  if (j.contains("weights") && !j.at("weights").is_null())
    weights = number_array(j.at("weights"), "weights");

  core::DiscreteDomain domain(d, std::move(flat), std::move(weights));

  const json& fields = j.at("fields");
  if (!fields.is_array() || static_cast<int>(fields.size()) != order - 1)
    throw IoError("fields must hold exactly N-1 sampled vector fields");
  std::vector<double> values;
  for (const auto& field : fields) {
    if (!field.is_array() || static_cast<core::Index>(field.size()) != domain.size())
      throw IoError("each field must hold one vector per point");
    for (const auto& row : field) {
      const std::vector<double> u = number_array(row, "field value");
      if (static_cast<int>(u.size()) != d) throw IoError("field vector dimension mismatch");
      values.insert(values.end(), u.begin(), u.end());
    }
  }
  core::FieldTuple tuple(order, domain.size(), d, std::move(values));
  return ProblemInput{std::move(domain), std::move(tuple)};
}

json problem_to_json(const ProblemInput& input) {
  json j;
  j["dimension"] = input.domain.dimension();
  j["order"] = input.fields.order();
  json points = json::array();
  for (core::Index i = 0; i < input.domain.size(); ++i) {
    json row = json::array();
    for (const double c : input.domain.point(i)) row.push_back(c);
    points.push_back(std::move(row));
  }
  j["points"] = std::move(points);
  json weights = json::array();
  for (const double w : input.domain.weights()) weights.push_back(w);
  j["weights"] = std::move(weights);
  json fields = json::array();
  for (int l = 0; l < input.fields.field_count(); ++l) {
    json field = json::array();
    for (core::Index i = 0; i < input.domain.size(); ++i) {
      json row = json::array();
      for (const double c : input.fields.value(l, i)) row.push_back(c);
      field.push_back(std::move(row));
    }
    fields.push_back(std::move(field));
  }
  j["fields"] = std::move(fields);
  return j;
}

ProblemInput problem_from_csv(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line)) throw IoError("empty CSV input");

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream row(s);
    while (std::getline(row, cell, ',')) out.push_back(cell);
    return out;
  };

  const std::vector<std::string> header = split(line);
  int d = 0;
  while (d < static_cast<int>(header.size()) &&
         header[static_cast<std::size_t>(d)] == "x" + std::to_string(d + 1))
    ++d;
  if (d == 0) throw IoError("CSV header must start with x1..xd");
  const int field_cols = static_cast<int>(header.size()) - d;
  if (field_cols <= 0 || field_cols % d != 0)
    throw IoError("CSV header must list u1_1.. field columns, a multiple of d");
  const int n_fields = field_cols / d;
  for (int l = 0; l < n_fields; ++l) {
    for (int c = 0; c < d; ++c) {
      const std::string expect = "u" + std::to_string(l + 1) + "_" + std::to_string(c + 1);
      if (header[static_cast<std::size_t>(d + l * d + c)] != expect)
        throw IoError("CSV header column mismatch, expected " + expect);
    }
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) throw IoError("CSV row width mismatch");
    std::vector<double> row;
    for (const std::string& cell : cells) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError("CSV cell is not a number: " + cell);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("CSV has no data rows");

  const core::Index m = static_cast<core::Index>(rows.size());
  std::vector<double> points;
  std::vector<double> values(static_cast<std::size_t>(n_fields) * static_cast<std::size_t>(m) *
                             static_cast<std::size_t>(d));
  for (core::Index i = 0; i < m; ++i) {
    for (int c = 0; c < d; ++c) points.push_back(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
    for (int l = 0; l < n_fields; ++l)
      for (int c = 0; c < d; ++c)
        values[(static_cast<std::size_t>(l) * static_cast<std::size_t>(m) +
                static_cast<std::size_t>(i)) *
                   static_cast<std::size_t>(d) +
               static_cast<std::size_t>(c)] =
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d + l * d + c)];
  }
  core::DiscreteDomain domain(d, std::move(points));
  core::FieldTuple fields(n_fields + 1, m, d, std::move(values));
  return ProblemInput{std::move(domain), std::move(fields)};
}

ProblemInput load_problem(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".csv") return problem_from_csv(text);
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("JSON parse error in " + path.string() + ": " + e.what());
  }
  return problem_from_json(j);
}

void save_problem(const std::filesystem::path& path, const ProblemInput& input) {
  write_file(path, problem_to_json(input).dump(2) + "\n");
}

json tensor_to_json(const core::GridHamiltonian& h) {
  json j;
  j["order"] = h.order();
  j["m"] = h.m();
  json values = json::array();
  for (const double v : h.values()) values.push_back(v);
  j["values"] = std::move(values);
  const core::HamiltonianFlags& f = h.flags();
  j["flags"] = json{{"diagonal_zero", f.diagonal_zero},
                    {"sub_antisymmetric", f.sub_antisymmetric},
                    {"antisymmetric", f.antisymmetric}};
  return j;
}

core::GridHamiltonian tensor_from_json(const json& j) {
  if (!j.contains("order") || !j.contains("m") || !j.contains("values"))
    throw IoError("tensor requires order, m, values");
  const int order = j.at("order").get<int>();
  const core::Index m = j.at("m").get<core::Index>();
  std::vector<double> values = number_array(j.at("values"), "values");
  core::HamiltonianFlags flags;
  if (j.contains("flags")) {
    const json& f = j.at("flags");
    flags.diagonal_zero = f.value("diagonal_zero", false);
    flags.sub_antisymmetric = f.value("sub_antisymmetric", false);
    flags.antisymmetric = f.value("antisymmetric", false);
  }
  return core::GridHamiltonian(order, m, std::move(values), flags);
}

core::GridHamiltonian load_tensor(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("JSON parse error in " + path.string() + ": " + e.what());
  }
  return tensor_from_json(j);
}

void save_tensor(const std::filesystem::path& path, const core::GridHamiltonian& h) {
  write_file(path, tensor_to_json(h).dump(2) + "\n");
}

json coupling_to_json(const core::SigmaCoupling& pi) {
  json j;
  j["order"] = pi.order();
  j["m"] = pi.m();
  json entries = json::array();
  std::vector<core::Index> tuple(static_cast<std::size_t>(pi.order()));
  for (core::Rank r = 0; r < pi.size(); ++r) {
    if (pi[r] <= 0.0) continue;
    core::unrank_tuple(r, pi.m(), pi.order(), tuple);
    json t = json::array();
    for (const core::Index i : tuple) t.push_back(i);
    entries.push_back(json::array({std::move(t), pi[r]}));
  }
  j["entries"] = std::move(entries);
  return j;
}

core::SigmaCoupling coupling_from_json(const json& j, std::span<const double> first_marginal) {
  if (!j.contains("order") || !j.contains("m") || !j.contains("entries"))
    throw IoError("coupling requires order, m, entries");
  const int order = j.at("order").get<int>();
  const core::Index m = j.at("m").get<core::Index>();
  const core::Rank size = core::checked_tensor_size(m, order);
  std::vector<double> mass(static_cast<std::size_t>(size), 0.0);
  for (const auto& entry : j.at("entries")) {
    if (!entry.is_array() || entry.size() != 2) throw IoError("coupling entry must be [tuple, mass]");
    std::vector<core::Index> tuple;
    for (const auto& v : entry.at(0)) tuple.push_back(v.get<core::Index>());
    if (static_cast<int>(tuple.size()) != order) throw IoError("coupling tuple length mismatch");
    mass[static_cast<std::size_t>(core::tuple_rank(tuple, m))] = entry.at(1).get<double>();
  }
  return core::SigmaCoupling(order, m, std::move(mass), first_marginal);
}

json involution_to_json(const core::NInvolution& s) {
  json j;
  j["order"] = s.order();
  json perm = json::array();
  for (const core::Index v : s.perm()) perm.push_back(v);
  j["perm"] = std::move(perm);
  return j;
}

core::NInvolution involution_from_json(const json& j) {
  if (!j.contains("order") || !j.contains("perm"))
    throw IoError("involution requires order and perm");
  std::vector<core::Index> perm;
  for (const auto& v : j.at("perm")) perm.push_back(v.get<core::Index>());
  return core::NInvolution(j.at("order").get<int>(), std::move(perm));
}

json witness_to_json(const monotonicity::CycleWitness& witness) {
  json j;
  json cycle = json::array();
  for (const core::Index i : witness.cycle.indices) cycle.push_back(i);
  j["cycle"] = std::move(cycle);
  j["defect"] = witness.defect;
  j["kind"] = monotonicity::kind_label(witness.kind, witness.step);
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

std::string digest_hex(const std::string& bytes) {
  const std::uint64_t digest = fnv1a64(bytes);
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(digest));
  return std::string(buffer);
}

}  // namespace cymono::io
