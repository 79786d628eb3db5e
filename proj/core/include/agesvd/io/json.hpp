#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agesvd/cluster.hpp"
#include "agesvd/regress.hpp"
#include "agesvd/schedule.hpp"

namespace agesvd::io {

// Numbers are written as shortest round-trip decimal strings; readers accept
// strings or plain JSON numbers.
[[nodiscard]] std::string basis_to_json(const ComponentBasis& basis);
[[nodiscard]] ComponentBasis basis_from_json(const std::string& text);

[[nodiscard]] std::string models_to_json(const std::vector<LinearModel>& models);
[[nodiscard]] std::vector<LinearModel> models_from_json(const std::string& text);

[[nodiscard]] std::string gmm_to_json(const GmmModel& model, const ClusterAssignment& assignment,
                                      const std::vector<std::string>& labels);

[[nodiscard]] std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace agesvd::io
