#include "oscsde/output.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace oscsde {

using Json = nlohmann::ordered_json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

// JSON has no NaN/Inf; they become null.
Json number(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

Json config_json(const ExperimentConfig& config) {
  Json out = Json::object();
  for (const auto& [key, value] : config.describe()) out[key] = value;
  return out;
}

std::string provenance(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : config.describe()) out += "# " + key + "=" + value + "\n";
  return out;
}

Json states_json(const std::vector<StateVector>& states) {
  Json x = Json::array();
  for (const auto& s : states) {
    Json row = Json::array();
    for (double v : s) row.push_back(number(v));
    x.push_back(std::move(row));
  }
  return x;
}

Json path_json(const SampledPath& path, std::uint64_t seed) {
  Json out = Json::object();
  out["t"] = path.times;
  out["x"] = states_json(path.states);
  out["scheme"] = path.scheme;
  out["seed"] = seed;
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string render_csv(const TableResult& result) {
  const auto& c = result.config;
  std::ostringstream out;
  out << provenance(c) << kCsvHeader << '\n';
  for (const auto& row : result.table.rows) {
    const GroupFit* group = result.fit_for(row.scheme, row.epsilon);
    const bool fitted = group && group->fit;
    out << to_string(c.experiment) << ',' << c.problem << ',' << to_string(row.scheme) << ','
        << format_number(row.epsilon) << ',' << format_number(row.h) << ','
        << row.estimate.sample_count << ',' << format_number(row.estimate.value) << ','
        << format_number(row.estimate.half_width) << ','
        << (fitted ? format_number(group->fit->slope) : "nan") << ','
        << (fitted ? format_number(group->fit->max_residual) : "nan") << ',' << c.seed << '\n';
  }
  return out.str();
}

std::string render_json(const TableResult& result) {
  Json rows = Json::array();
  for (const auto& row : result.table.rows) {
    Json r = Json::object();
    r["scheme"] = to_string(row.scheme);
    r["epsilon"] = row.epsilon;
    r["h"] = row.h;
    r["M"] = row.estimate.sample_count;
    r["error"] = number(row.estimate.value);
    r["ci_half_width"] = number(row.estimate.half_width);
    r["stream_key"] = row.stream_key;
    rows.push_back(std::move(r));
  }
  Json fits = Json::array();
  for (const auto& g : result.fits) {
    Json f = Json::object();
    f["scheme"] = to_string(g.scheme);
    f["epsilon"] = g.epsilon;
    if (g.fit) {
      f["slope"] = number(g.fit->slope);
      f["intercept"] = number(g.fit->intercept);
      f["residual"] = number(g.fit->max_residual);
      f["points"] = g.fit->points;
    } else {
      f["slope"] = nullptr;
    }
    fits.push_back(std::move(f));
  }
  Json out = Json::object();
  out["config"] = config_json(result.config);
  out["rows"] = std::move(rows);
  out["fits"] = std::move(fits);
  return dump(out);
}

std::string render_csv(const ResonanceResult& result) {
  const auto& c = result.config;
  std::ostringstream out;
  out << provenance(c) << "# effective-final-time=" << format_number(result.final_time) << '\n'
      << "# median-em-error=" << format_number(result.median_em_error) << '\n'
      << "# median-micro-macro-error=" << format_number(result.median_micro_macro_error) << '\n'
      << "experiment,problem,scheme,epsilon,h,sample,error,diverged,seed\n";
  const double eps = c.epsilons.front();
  for (const auto& run : result.runs) {
    for (bool mm : {false, true}) {
      out << to_string(c.experiment) << ',' << c.problem << ','
          << (mm ? "micro-macro" : "em") << ',' << format_number(eps) << ','
          << format_number(result.step) << ',' << run.sample << ','
          << format_number(mm ? run.micro_macro_error : run.em_error) << ','
          << ((mm ? run.micro_macro_diverged : run.em_diverged) ? 1 : 0) << ',' << c.seed << '\n';
    }
  }
  return out.str();
}

std::string render_json(const ResonanceResult& result) {
  Json runs = Json::array();
  for (const auto& run : result.runs) {
    Json r = Json::object();
    r["sample"] = run.sample;
    r["em_error"] = number(run.em_error);
    r["em_diverged"] = run.em_diverged;
    r["micro_macro_error"] = number(run.micro_macro_error);
    r["micro_macro_diverged"] = run.micro_macro_diverged;
    runs.push_back(std::move(r));
  }
  Json paths = Json::array();
  for (const auto& p : result.paths) paths.push_back(path_json(p, result.config.seed));
  Json out = Json::object();
  out["config"] = config_json(result.config);
  out["step"] = result.step;
  out["step_count"] = result.step_count;
  out["effective_final_time"] = result.final_time;
  out["median_em_error"] = number(result.median_em_error);
  out["median_micro_macro_error"] = number(result.median_micro_macro_error);
  out["runs"] = std::move(runs);
  out["paths"] = std::move(paths);
  return dump(out);
}

std::string render_csv(const ValidationResult& result) {
  std::ostringstream out;
  out << provenance(result.config) << "problem,check,value,lower,upper,pass\n";
  for (const auto& e : result.entries) {
    out << e.problem << ',' << e.check << ',' << format_number(e.value) << ','
        << format_number(e.lower) << ',' << format_number(e.upper) << ','
        << (e.pass ? "pass" : "fail") << '\n';
  }
  return out.str();
}

std::string render_json(const ValidationResult& result) {
  Json entries = Json::array();
  for (const auto& e : result.entries) {
    Json j = Json::object();
    j["problem"] = e.problem;
    j["check"] = e.check;
    j["value"] = number(e.value);
    j["lower"] = number(e.lower);
    j["upper"] = number(e.upper);
    j["pass"] = e.pass;
    entries.push_back(std::move(j));
  }
  Json out = Json::object();
  out["config"] = config_json(result.config);
  out["pass"] = result.passes();
  out["entries"] = std::move(entries);
  return dump(out);
}

std::string render_report(const ValidationResult& result) {
  std::ostringstream out;
  for (const auto& e : result.entries) {
    out << (e.pass ? "PASS " : "FAIL ") << e.problem << ' ' << e.check << " = "
        << format_number(e.value) << " (allowed [" << format_number(e.lower) << ", "
        << format_number(e.upper) << "])\n";
  }
  return out.str();
}

std::string render_path_json(const SampledPath& path, std::uint64_t seed) {
  return dump(path_json(path, seed));
}

std::string render_error(std::string_view kind, std::string_view message,
                         const NumericalBlowUp* blow_up) {
  Json out = Json::object();
  out["error"] = kind;
  out["message"] = message;
  if (blow_up) {
    out["step"] = blow_up->step();
    out["time"] = number(blow_up->time());
    if (blow_up->path() != NumericalBlowUp::kNoPath) out["path"] = blow_up->path();
  }
  return out.dump() + "\n";
}

}  // namespace oscsde
