#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ffsc/model.hpp"

namespace ffsc {

/// Source description read from a model file.
struct SourceModel {
  std::string name;
  Pmf prior = Pmf::uniform(2);
  DistortionMatrix distortion = DistortionMatrix::hamming(2);
  std::optional<TestChannel> channel;  // solved with Blahut-Arimoto when absent
};

/// Parses the JSON model document described in docs/FORMAT.md. Throws InvalidArgument.
[[nodiscard]] SourceModel parse_model(std::string_view json_text);
[[nodiscard]] std::string model_to_json(const SourceModel& m);
/// `name_or_path` is a built-in name ("binary-hamming", "ternary-hamming") or a file path.
[[nodiscard]] SourceModel load_model(const std::string& name_or_path);

[[nodiscard]] SourceModel binary_hamming_model();
[[nodiscard]] SourceModel ternary_hamming_model();

}  // namespace ffsc
