#include "sglayout/checkpoint.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>

#include "sglayout/parsing.hpp"
#include "sglayout/util.hpp"

namespace sglayout {

using nlohmann::json;

void save_checkpoint(const LayoutModel& model, const Vocab& vocab, const std::string& path) {
  if (vocab_fingerprint(vocab) != model.vocab_hash) {
    throw std::invalid_argument("save_checkpoint: vocabulary does not match the model");
  }
  json doc;
  doc["format_version"] = 1;
  doc["dims"] = {{"d1", model.dims.d1},
                 {"d2", model.dims.d2},
                 {"hidden", model.dims.hidden},
                 {"layers", model.dims.layers}};
  doc["vocab"] = {{"categories", vocab.categories}, {"predicates", vocab.predicates}};
  doc["vocab_hash"] = to_hex(model.vocab_hash);
  json arrays = json::object();
  for (const auto& [name, tensor] : model.parameters()) {
    arrays[name] = {{"shape", tensor.shape()}, {"values", tensor.data()}};
  }
  doc["arrays"] = std::move(arrays);
  write_file(path, doc.dump() + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": not a valid checkpoint: " + e.what());
  }

  try {
    if (doc.at("format_version").get<int>() != 1) {
      throw std::runtime_error(path + ": unsupported checkpoint format_version");
    }
    const json& jd = doc.at("dims");
    Dims dims;
    dims.d1 = jd.at("d1").get<int>();
    dims.d2 = jd.at("d2").get<int>();
    dims.hidden = jd.at("hidden").get<int>();
    dims.layers = jd.at("layers").get<int>();

    Checkpoint ckpt;
    ckpt.vocab.categories = doc.at("vocab").at("categories").get<std::vector<std::string>>();
    ckpt.vocab.predicates = doc.at("vocab").at("predicates").get<std::vector<std::string>>();
    const std::string stored_hash = doc.at("vocab_hash").get<std::string>();
    if (stored_hash != to_hex(vocab_fingerprint(ckpt.vocab))) {
      throw std::runtime_error(path + ": vocab_hash does not match the stored vocabulary");
    }

    // init_model fixes the parameter wiring; every buffer is then overwritten.
    ckpt.model = init_model(ckpt.vocab, dims, 0);
    const json& arrays = doc.at("arrays");
    ad::NamedParams params = ckpt.model.parameters();
    for (auto& [name, tensor] : params) {
      if (!arrays.contains(name)) {
        throw std::runtime_error(path + ": checkpoint missing array \"" + name + "\"");
      }
      const json& entry = arrays.at(name);
      const auto shape = entry.at("shape").get<std::vector<int>>();
      if (shape != tensor.shape()) {
        throw std::runtime_error(path + ": array \"" + name + "\" has shape " +
                                 ad::shape_str(shape) + ", expected " +
                                 ad::shape_str(tensor.shape()));
      }
      auto values = entry.at("values").get<std::vector<double>>();
      if (values.size() != tensor.data().size()) {
        throw std::runtime_error(path + ": array \"" + name + "\" has wrong element count");
      }
      tensor.data() = std::move(values);
    }
    if (arrays.size() != params.size()) {
      throw std::runtime_error(path + ": checkpoint contains unknown arrays");
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": malformed checkpoint: " + e.what());
  }
}

LayoutModel load_checkpoint(const std::string& path, const Vocab& vocab) {
  Checkpoint ckpt = load_checkpoint(path);
  if (vocab_fingerprint(vocab) != ckpt.model.vocab_hash) {
    std::ostringstream os;
    os << path << ": vocabulary mismatch (checkpoint " << to_hex(ckpt.model.vocab_hash)
       << ", supplied " << to_hex(vocab_fingerprint(vocab)) << ")";
    throw std::runtime_error(os.str());
  }
  return std::move(ckpt.model);
}

}  // namespace sglayout
