#include "ffsc/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ffsc/error.hpp"

namespace ffsc {

using nlohmann::json;

SourceModel parse_model(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    SourceModel m;
    m.name = j.value("name", std::string("unnamed"));
    const auto size = j.at("alphabet_size").get<std::size_t>();
    const auto probs = j.at("probs").get<std::vector<double>>();
    if (probs.size() != size) throw InvalidArgument("probs must have alphabet_size entries");
    m.prior = Pmf(probs);
    m.distortion = DistortionMatrix(j.at("distortion").get<std::vector<std::vector<double>>>());
    if (m.distortion.rows() != size) throw InvalidArgument("distortion must have alphabet_size rows");
    const auto recon = j.value("reconstruction_size", m.distortion.cols());
    if (recon != m.distortion.cols()) throw InvalidArgument("distortion must have reconstruction_size columns");
    if (j.contains("channel")) {
      m.channel = TestChannel(j.at("channel").get<std::vector<std::vector<double>>>());
      if (m.channel->input_size() != size || m.channel->output_size() != recon) {
        throw InvalidArgument("channel dimensions do not match the model");
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed model file: ") + e.what());
  }
}

std::string model_to_json(const SourceModel& m) {
  json j;
  j["name"] = m.name;
  j["alphabet_size"] = m.prior.size();
  j["probs"] = std::vector<double>(m.prior.probs().begin(), m.prior.probs().end());
  std::vector<std::vector<double>> d(m.distortion.rows(), std::vector<double>(m.distortion.cols()));
  for (std::size_t x = 0; x < d.size(); ++x) {
    for (std::size_t y = 0; y < d[x].size(); ++y) d[x][y] = m.distortion(x, y);
  }
  j["distortion"] = d;
  j["reconstruction_size"] = m.distortion.cols();
  if (m.channel) {
    std::vector<std::vector<double>> rows;
    for (std::size_t x = 0; x < m.channel->input_size(); ++x) {
      const auto p = m.channel->row(x).probs();
      rows.emplace_back(p.begin(), p.end());
    }
    j["channel"] = rows;
  }
  return j.dump(2);
}

SourceModel binary_hamming_model() {
  return SourceModel{"binary-hamming", Pmf::uniform(2), DistortionMatrix::hamming(2), std::nullopt};
}

SourceModel ternary_hamming_model() {
  return SourceModel{"ternary-hamming", Pmf::uniform(3), DistortionMatrix::hamming(3), std::nullopt};
}

SourceModel load_model(const std::string& name_or_path) {
  if (name_or_path == "binary-hamming") return binary_hamming_model();
  if (name_or_path == "ternary-hamming") return ternary_hamming_model();
  std::ifstream in(name_or_path);
  if (!in) throw InvalidArgument("cannot open model file '" + name_or_path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace ffsc
