#include "handwash/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "handwash/errors.hpp"
#include "handwash/json_util.hpp"

namespace handwash {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view v, std::string_view key) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::int64_t parse_int(std::string_view v, std::string_view key) {
  std::int64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
  }
  return out;
}

Movement parse_code(std::string_view v, std::string_view key) {
  const auto code = movement_from_code(static_cast<int>(parse_int(trim(v), key)));
  if (!code) throw ConfigError("'" + std::string(key) + "': unknown movement code " + std::string(v));
  return *code;
}

void apply_key(ComplianceConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "total_duration_s") {
    cfg.total_duration_s = parse_double(value, key);
  } else if (key == "required_movements") {
    cfg.required_movements.clear();
    std::size_t pos = 0;
    while (pos <= value.size() && !value.empty()) {
      const auto comma = value.find(',', pos);
      const auto item = trim(value.substr(pos, comma == std::string_view::npos ? value.npos : comma - pos));
      if (!item.empty()) cfg.required_movements.insert(parse_code(item, key));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  } else if (key.starts_with("min_s.")) {
    cfg.per_movement_min_s[parse_code(key.substr(6), key)] = parse_double(value, key);
  } else if (key == "poll_period_s") {
    cfg.poll_period_s = parse_double(value, key);
  } else if (key == "gate.on_threshold") {
    cfg.gate.on_threshold = parse_double(value, key);
  } else if (key == "gate.off_threshold") {
    cfg.gate.off_threshold = parse_double(value, key);
  } else if (key == "gate.min_duration_s") {
    cfg.gate.min_duration_s = parse_double(value, key);
  } else if (key == "gate.max_gap_s") {
    cfg.gate.max_gap_s = parse_double(value, key);
  } else if (key == "smoothing_window") {
    const auto w = parse_int(value, key);
    if (w < 1) throw ConfigError("smoothing_window must be >= 1");
    cfg.smoothing_window = static_cast<std::size_t>(w);
  } else if (key == "classifier.kind") {
    cfg.classifier.kind = classifier_kind_from_name(value);
  } else if (key == "classifier.input_size") {
    cfg.classifier.input_size = static_cast<int>(parse_int(value, key));
  } else if (key == "classifier.noise_epsilon") {
    cfg.classifier.noise_epsilon = parse_double(value, key);
  } else if (key == "classifier.model_path") {
    cfg.classifier.model_path = std::string(value);
  } else if (key == "classifier.constant_code") {
    cfg.classifier.constant_code = parse_code(value, key);
  } else if (key == "classifier.seed") {
    cfg.classifier.seed = static_cast<std::uint64_t>(parse_int(value, key));
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> known, const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

ComplianceConfig parse_config_text(std::string_view text, const ComplianceConfig& base) {
  ComplianceConfig cfg = base;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ComplianceConfig load_config(const std::string& path, const ComplianceConfig& base) {
  return parse_config_text(json_util::read_file(path), base);
}

std::string format_config_text(const ComplianceConfig& cfg) {
  std::ostringstream out;
  out << "total_duration_s = " << format_double(cfg.total_duration_s) << "\n";
  out << "required_movements = ";
  bool first = true;
  for (Movement m : cfg.required_movements) {
    out << (first ? "" : ",") << code_of(m);
    first = false;
  }
  out << "\n";
  for (const auto& [m, s] : cfg.per_movement_min_s) {
    out << "min_s." << code_of(m) << " = " << format_double(s) << "\n";
  }
  out << "poll_period_s = " << format_double(cfg.poll_period_s) << "\n";
  out << "gate.on_threshold = " << format_double(cfg.gate.on_threshold) << "\n";
  out << "gate.off_threshold = " << format_double(cfg.gate.off_threshold) << "\n";
  out << "gate.min_duration_s = " << format_double(cfg.gate.min_duration_s) << "\n";
  out << "gate.max_gap_s = " << format_double(cfg.gate.max_gap_s) << "\n";
  out << "smoothing_window = " << cfg.smoothing_window << "\n";
  out << "classifier.kind = " << classifier_kind_name(cfg.classifier.kind) << "\n";
  out << "classifier.input_size = " << cfg.classifier.input_size << "\n";
  out << "classifier.noise_epsilon = " << format_double(cfg.classifier.noise_epsilon) << "\n";
  out << "classifier.model_path = " << cfg.classifier.model_path << "\n";
  out << "classifier.constant_code = " << code_of(cfg.classifier.constant_code) << "\n";
  out << "classifier.seed = " << cfg.classifier.seed << "\n";
  return out.str();
}

nlohmann::json config_to_json(const ComplianceConfig& cfg) {
  nlohmann::json required = nlohmann::json::array();
  for (Movement m : cfg.required_movements) required.push_back(code_of(m));
  nlohmann::json mins = nlohmann::json::object();
  for (const auto& [m, s] : cfg.per_movement_min_s) mins[std::to_string(code_of(m))] = s;
  return {
      {"total_duration_s", cfg.total_duration_s},
      {"required_movements", required},
      {"per_movement_min_s", mins},
      {"poll_period_s", cfg.poll_period_s},
      {"gate",
       {{"on_threshold", cfg.gate.on_threshold},
        {"off_threshold", cfg.gate.off_threshold},
        {"min_duration_s", cfg.gate.min_duration_s},
        {"max_gap_s", cfg.gate.max_gap_s}}},
      {"smoothing_window", cfg.smoothing_window},
      {"classifier",
       {{"kind", classifier_kind_name(cfg.classifier.kind)},
        {"input_size", cfg.classifier.input_size},
        {"noise_epsilon", cfg.classifier.noise_epsilon},
        {"model_path", cfg.classifier.model_path},
        {"constant_code", code_of(cfg.classifier.constant_code)},
        {"seed", cfg.classifier.seed}}},
  };
}

ComplianceConfig config_from_json(const nlohmann::json& j, const ComplianceConfig& base) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(j, {"total_duration_s", "required_movements", "per_movement_min_s", "poll_period_s", "gate",
                     "smoothing_window", "classifier"},
                 "configuration");
  if (auto it = j.find("gate"); it != j.end() && it->is_object()) {
    reject_unknown(*it, {"on_threshold", "off_threshold", "min_duration_s", "max_gap_s"}, "gate");
  }
  if (auto it = j.find("classifier"); it != j.end() && it->is_object()) {
    reject_unknown(*it, {"kind", "input_size", "noise_epsilon", "model_path", "constant_code", "seed"},
                   "classifier");
  }
  ComplianceConfig cfg = base;
  try {
    auto number = [&](const nlohmann::json& obj, const char* key, double& dst) {
      if (auto it = obj.find(key); it != obj.end()) {
        if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
        dst = it->get<double>();
      }
    };
    number(j, "total_duration_s", cfg.total_duration_s);
    number(j, "poll_period_s", cfg.poll_period_s);
    if (auto it = j.find("required_movements"); it != j.end()) {
      if (!it->is_array()) throw ConfigError("'required_movements' must be an array");
      cfg.required_movements.clear();
      for (const auto& c : *it) {
        if (!c.is_number_integer()) throw ConfigError("'required_movements' must hold integer codes");
        const auto m = movement_from_code(c.get<int>());
        if (!m) throw ConfigError("unknown movement code " + std::to_string(c.get<int>()));
        cfg.required_movements.insert(*m);
      }
    }
    if (auto it = j.find("per_movement_min_s"); it != j.end()) {
      if (!it->is_object()) throw ConfigError("'per_movement_min_s' must be an object");
      for (const auto& [code, seconds] : it->items()) {
        if (!seconds.is_number()) throw ConfigError("per-movement minimum must be a number");
        cfg.per_movement_min_s[parse_code(code, "per_movement_min_s")] = seconds.get<double>();
      }
    }
    if (auto it = j.find("gate"); it != j.end()) {
      if (!it->is_object()) throw ConfigError("'gate' must be an object");
      number(*it, "on_threshold", cfg.gate.on_threshold);
      number(*it, "off_threshold", cfg.gate.off_threshold);
      number(*it, "min_duration_s", cfg.gate.min_duration_s);
      number(*it, "max_gap_s", cfg.gate.max_gap_s);
    }
    if (auto it = j.find("smoothing_window"); it != j.end()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
        throw ConfigError("'smoothing_window' must be a positive integer");
      }
      cfg.smoothing_window = it->get<std::size_t>();
    }
    if (auto it = j.find("classifier"); it != j.end()) {
      if (!it->is_object()) throw ConfigError("'classifier' must be an object");
      const auto& c = *it;
      if (auto k = c.find("kind"); k != c.end()) cfg.classifier.kind = classifier_kind_from_name(k->get<std::string>());
      if (auto k = c.find("input_size"); k != c.end()) cfg.classifier.input_size = k->get<int>();
      number(c, "noise_epsilon", cfg.classifier.noise_epsilon);
      if (auto k = c.find("model_path"); k != c.end()) cfg.classifier.model_path = k->get<std::string>();
      if (auto k = c.find("constant_code"); k != c.end()) {
        cfg.classifier.constant_code = parse_code(std::to_string(k->get<int>()), "constant_code");
      }
      if (auto k = c.find("seed"); k != c.end()) cfg.classifier.seed = k->get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad configuration value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace handwash
