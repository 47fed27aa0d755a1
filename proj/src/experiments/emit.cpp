#include "spinmem/experiments/emit.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "spinmem/errors.hpp"

namespace spinmem {

namespace {

using nlohmann::json;

enum class CellType { Int, Real, Complex };

std::string_view type_name(CellType t) {
  switch (t) {
    case CellType::Int:
      return "int";
    case CellType::Real:
      return "real";
    case CellType::Complex:
      return "complex";
  }
  return "real";
}

CellType parse_type(const std::string& s) {
  if (s == "int") return CellType::Int;
  if (s == "complex") return CellType::Complex;
  if (s == "real") return CellType::Real;
  throw ValidationError("unknown column type '" + s + "'");
}

std::vector<CellType> column_types(const DataTable& t) {
  std::vector<CellType> types(t.columns.size(), CellType::Real);
  if (t.rows.empty()) return types;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    types[i] = static_cast<CellType>(t.rows.front().at(i).index());
  }
  return types;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

json tomogram_json(const NamedTomogram& nt) {
  const auto& t = nt.tomogram;
  json re = json::array();
  json im = json::array();
  for (int i = 0; i < t.dim; ++i) {
    json rrow = json::array();
    json irow = json::array();
    for (int j = 0; j < t.dim; ++j) {
      rrow.push_back(t.real_part(i, j));
      irow.push_back(t.imag_part(i, j));
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return {{"name", nt.name},
          {"dim", t.dim},
          {"basis", t.basis_labels},
          {"real", std::move(re)},
          {"imag", std::move(im)}};
}

NamedTomogram tomogram_from_json(const json& j) {
  NamedTomogram nt;
  nt.name = j.at("name").get<std::string>();
  auto& t = nt.tomogram;
  t.dim = j.at("dim").get<int>();
  t.basis_labels = j.at("basis").get<std::vector<std::string>>();
  t.real_part.resize(t.dim, t.dim);
  t.imag_part.resize(t.dim, t.dim);
  for (int i = 0; i < t.dim; ++i) {
    for (int k = 0; k < t.dim; ++k) {
      t.real_part(i, k) = j.at("real").at(i).at(k).get<double>();
      t.imag_part(i, k) = j.at("imag").at(i).at(k).get<double>();
    }
  }
  return nt;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw ValidationError("unknown output format '" + std::string(text) +
                        "' (expected csv or json)");
}

json to_json(const ScenarioResult& r) {
  json j;
  j["config"] = to_json(r.config);
  j["columns"] = r.table.columns;
  json types = json::array();
  for (auto t : column_types(r.table)) types.push_back(std::string(type_name(t)));
  j["column_types"] = std::move(types);
  json rows = json::array();
  for (const auto& row : r.table.rows) {
    json jr = json::array();
    for (const auto& cell : row) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Complex>) {
              jr.push_back(complex_json(v));
            } else {
              jr.push_back(v);
            }
          },
          cell);
    }
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  json tomos = json::array();
  for (const auto& t : r.tomograms) tomos.push_back(tomogram_json(t));
  j["tomograms"] = std::move(tomos);
  json summary = json::object();
  for (const auto& [k, v] : r.summary) summary[k] = v;
  j["summary"] = std::move(summary);
  json drawn = json::array();
  for (const auto& d : r.drawn_inputs) {
    drawn.push_back({{"run", d.run},
                     {"qubit", d.qubit},
                     {"up", complex_json(d.state.up)},
                     {"down", complex_json(d.state.down)}});
  }
  j["drawn_inputs"] = std::move(drawn);
  j["warnings"] = r.warnings;
  j["provenance"] = {{"artifact", r.provenance.artifact},
                     {"version", r.provenance.version},
                     {"timestamp", r.provenance.timestamp},
                     {"seed", r.provenance.seed},
                     {"config_hash", r.provenance.config_hash}};
  return j;
}

ScenarioResult result_from_json(const json& j) {
  try {
    ScenarioResult r;
    r.config = config_from_json(j.at("config"));
    r.table.columns = j.at("columns").get<std::vector<std::string>>();
    std::vector<CellType> types;
    for (const auto& t : j.at("column_types")) types.push_back(parse_type(t.get<std::string>()));
    for (const auto& jr : j.at("rows")) {
      std::vector<CellValue> row;
      for (std::size_t i = 0; i < jr.size(); ++i) {
        switch (types.at(i)) {
          case CellType::Int:
            row.emplace_back(jr.at(i).get<std::int64_t>());
            break;
          case CellType::Real:
            row.emplace_back(jr.at(i).is_null()
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : jr.at(i).get<double>());
            break;
          case CellType::Complex:
            row.emplace_back(complex_from_json(jr.at(i)));
            break;
        }
      }
      r.table.rows.push_back(std::move(row));
    }
    for (const auto& t : j.at("tomograms")) r.tomograms.push_back(tomogram_from_json(t));
    for (const auto& [k, v] : j.at("summary").items()) {
      r.summary.emplace_back(k, v.get<double>());
    }
    for (const auto& d : j.at("drawn_inputs")) {
      r.drawn_inputs.push_back({d.at("run").get<int>(), d.at("qubit").get<int>(),
                                {complex_from_json(d.at("up")),
                                 complex_from_json(d.at("down"))}});
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    const auto& p = j.at("provenance");
    r.provenance.artifact = p.at("artifact").get<std::string>();
    r.provenance.version = p.at("version").get<std::string>();
    r.provenance.timestamp = p.at("timestamp").get<std::string>();
    r.provenance.seed = p.at("seed").get<std::uint64_t>();
    r.provenance.config_hash = p.at("config_hash").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed result JSON: ") + e.what());
  }
}

void write_csv(const ScenarioResult& r, std::ostream& out) {
  const auto types = column_types(r.table);
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) {
    const auto& name = r.table.columns[i];
    if (types[i] == CellType::Complex) {
      out << name << "_re," << name << "_im,";
    } else {
      out << name << ',';
    }
  }
  out << "seed\n";
  const std::string seed = std::to_string(r.provenance.seed);
  for (const auto& row : r.table.rows) {
    for (const auto& cell : row) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Complex>) {
              out << format_double(v.real()) << ',' << format_double(v.imag()) << ',';
            } else if constexpr (std::is_same_v<T, double>) {
              out << format_double(v) << ',';
            } else {
              out << v << ',';
            }
          },
          cell);
    }
    out << seed << '\n';
  }
}

void write_result(const ScenarioResult& r, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::Csv) {
    write_csv(r, out);
  } else {
    out << to_json(r).dump(2) << '\n';
  }
}

void emit(const ScenarioResult& r, OutputFormat format,
          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_result(r, format, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ScenarioResult read_result_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return result_from_json(j);
}

}  // namespace spinmem
