#ifndef USM_TOOLS_CONFIG_HPP_
#define USM_TOOLS_CONFIG_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "usm.h"

namespace usmtool {

// Line-based key=value run configuration with [phantom], [solver], [train]
// and [eval] sections. Every field is optional; unknown sections or keys are
// rejected with the offending line number.
struct RunConfig {
  // [phantom] - subspace kind
  int subspace_count = 2;
  int ambient_dim = 30;
  std::vector<int> sub_dims = {3, 3};
  std::vector<int> points_per_subspace = {25, 25};
  double noise_sigma = 0.0;
  bool orthogonal = false;
  // [phantom] - ct kind
  usm_image_phantom_spec image;

  usm_solver_config solver;

  // [train]
  usm_train_config train;
  int latent_dim = 64;
  std::string activation = "none";
  int patch_size = 32;
  int stride = 32;

  // [eval]
  int radius = 2;
  double min_contrast = 0.1;

  RunConfig();
};

class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(int line, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical form: sections and keys sorted, one `key = value` per line,
// doubles at 17 significant digits.
std::string serialize_config(const RunConfig& cfg);

}  // namespace usmtool

#endif  // USM_TOOLS_CONFIG_HPP_
