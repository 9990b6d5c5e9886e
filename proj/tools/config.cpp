#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace usmtool {

RunConfig::RunConfig() {
  usm_image_phantom_spec_default(&image);
  usm_solver_config_default(&solver);
  usm_train_config_default(&train);
}

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i)
    out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

struct Field {
  std::function<void(const std::string&, int line)> set;
  std::function<std::string()> get;
};

Field int_field(int& ref) {
  return {[&ref](const std::string& v, int line) {
            try {
              size_t pos = 0;
              const int parsed = std::stoi(v, &pos);
              if (pos != v.size()) throw std::invalid_argument(v);
              ref = parsed;
            } catch (const std::exception&) {
              throw ConfigParseError(line, "expected integer, got '" + v + "'");
            }
          },
          [&ref] { return std::to_string(ref); }};
}

Field double_field(double& ref) {
  return {[&ref](const std::string& v, int line) {
            try {
              size_t pos = 0;
              const double parsed = std::stod(v, &pos);
              if (pos != v.size()) throw std::invalid_argument(v);
              ref = parsed;
            } catch (const std::exception&) {
              throw ConfigParseError(line, "expected number, got '" + v + "'");
            }
          },
          [&ref] { return fmt(ref); }};
}

Field bool_field(bool& ref) {
  return {[&ref](const std::string& v, int line) {
            if (v == "1" || v == "true")
              ref = true;
            else if (v == "0" || v == "false")
              ref = false;
            else
              throw ConfigParseError(line, "expected 0/1, got '" + v + "'");
          },
          [&ref] { return std::string(ref ? "1" : "0"); }};
}

Field cbool_field(int& ref) {
  return {[&ref](const std::string& v, int line) {
            if (v == "1" || v == "true")
              ref = 1;
            else if (v == "0" || v == "false")
              ref = 0;
            else
              throw ConfigParseError(line, "expected 0/1, got '" + v + "'");
          },
          [&ref] { return std::string(ref ? "1" : "0"); }};
}

Field uint64_field(uint64_t& ref) {
  return {[&ref](const std::string& v, int line) {
            try {
              size_t pos = 0;
              const unsigned long long parsed = std::stoull(v, &pos);
              if (pos != v.size()) throw std::invalid_argument(v);
              ref = parsed;
            } catch (const std::exception&) {
              throw ConfigParseError(line, "expected integer, got '" + v + "'");
            }
          },
          [&ref] { return std::to_string(ref); }};
}

Field int_list_field(std::vector<int>& ref) {
  return {[&ref](const std::string& v, int line) {
            std::vector<int> parsed;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) {
              try {
                size_t pos = 0;
                parsed.push_back(std::stoi(trim(item), &pos));
              } catch (const std::exception&) {
                throw ConfigParseError(line, "expected integer list, got '" + v + "'");
              }
            }
            if (parsed.empty())
              throw ConfigParseError(line, "empty integer list");
            ref = parsed;
          },
          [&ref] { return fmt(ref); }};
}

Field activation_field(std::string& ref) {
  return {[&ref](const std::string& v, int line) {
            if (v != "none" && v != "tanh")
              throw ConfigParseError(line, "activation must be none or tanh");
            ref = v;
          },
          [&ref] { return ref; }};
}

using Section = std::map<std::string, Field>;

std::map<std::string, Section> schema(RunConfig& cfg) {
  std::map<std::string, Section> s;
  Section& phantom = s["phantom"];
  phantom["subspace_count"] = int_field(cfg.subspace_count);
  phantom["ambient_dim"] = int_field(cfg.ambient_dim);
  phantom["sub_dims"] = int_list_field(cfg.sub_dims);
  phantom["points_per_subspace"] = int_list_field(cfg.points_per_subspace);
  phantom["noise_sigma"] = double_field(cfg.noise_sigma);
  phantom["orthogonal"] = bool_field(cfg.orthogonal);
  phantom["height"] = int_field(cfg.image.height);
  phantom["width"] = int_field(cfg.image.width);
  phantom["organ_count"] = int_field(cfg.image.organ_count);
  phantom["aorta_cx"] = int_field(cfg.image.aorta_cx);
  phantom["aorta_cy"] = int_field(cfg.image.aorta_cy);
  phantom["aorta_radius"] = int_field(cfg.image.aorta_radius);
  phantom["aorta_intensity"] = double_field(cfg.image.aorta_intensity);
  phantom["plaque_count"] = int_field(cfg.image.plaque_count);
  phantom["plaque_radius"] = int_field(cfg.image.plaque_radius);
  phantom["plaque_contrast"] = double_field(cfg.image.plaque_contrast);
  phantom["remap_x"] = double_field(cfg.image.remap_x);
  phantom["remap_y"] = double_field(cfg.image.remap_y);
  phantom["vessel_contrast_delta"] = double_field(cfg.image.vessel_contrast_delta);

  Section& solver = s["solver"];
  solver["lambda"] = double_field(cfg.solver.lambda);
  solver["mu"] = double_field(cfg.solver.mu);
  solver["rho"] = double_field(cfg.solver.rho);
  solver["tol"] = double_field(cfg.solver.tol);
  solver["max_iter"] = int_field(cfg.solver.max_iter);
  solver["normalize"] = cbool_field(cfg.solver.normalize_columns);

  Section& train = s["train"];
  train["latent_dim"] = int_field(cfg.latent_dim);
  train["learning_rate"] = double_field(cfg.train.learning_rate);
  train["steps"] = int_field(cfg.train.steps);
  train["w_rec"] = double_field(cfg.train.w_rec);
  train["w_cyc"] = double_field(cfg.train.w_cyc);
  train["w_se"] = double_field(cfg.train.w_se);
  train["refresh_period"] = int_field(cfg.train.c_refresh_period);
  train["batch"] = int_field(cfg.train.batch);
  train["activation"] = activation_field(cfg.activation);
  train["patch_size"] = int_field(cfg.patch_size);
  train["stride"] = int_field(cfg.stride);

  Section& eval = s["eval"];
  eval["radius"] = int_field(cfg.radius);
  eval["min_contrast"] = double_field(cfg.min_contrast);
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  auto sections = schema(cfg);

  std::stringstream ss(text);
  std::string raw;
  std::string current;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigParseError(line_no, "malformed section header");
      current = trim(line.substr(1, line.size() - 2));
      if (sections.find(current) == sections.end())
        throw ConfigParseError(line_no, "unknown section [" + current + "]");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError(line_no, "expected key = value");
    if (current.empty())
      throw ConfigParseError(line_no, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    Section& section = sections[current];
    auto it = section.find(key);
    if (it == section.end())
      throw ConfigParseError(line_no,
                             "unknown key '" + key + "' in [" + current + "]");
    it->second.set(value, line_no);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigParseError(0, "cannot open " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  auto sections = schema(copy);
  std::string out;
  for (const auto& [name, section] : sections) {  // std::map keeps keys sorted
    out += "[" + name + "]\n";
    for (const auto& [key, field] : section)
      out += key + " = " + field.get() + "\n";
  }
  return out;
}

}  // namespace usmtool
