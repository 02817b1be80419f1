#include "sglayout/parsing.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "sglayout/util.hpp"

namespace sglayout {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

void check_unique(const std::vector<std::string>& names, const char* kind,
                  const std::string& origin) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!seen.insert(names[i]).second) {
      std::ostringstream os;
      os << origin << ": duplicate " << kind << " name \"" << names[i] << "\" (entry " << i << ")";
      throw ParseError(os.str());
    }
  }
}

std::vector<std::string> string_array(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw ParseError(origin + ": missing or non-array \"" + key + "\"");
  }
  std::vector<std::string> out;
  for (const auto& item : j[key]) {
    if (!item.is_string()) throw ParseError(origin + ": non-string entry in \"" + key + "\"");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

Vocab parse_vocab_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(origin + ": vocab file must be a JSON object");
  Vocab v;
  v.categories = string_array(j, "categories", origin);
  v.predicates = string_array(j, "predicates", origin);
  check_unique(v.categories, "category", origin);
  check_unique(v.predicates, "predicate", origin);
  return v;
}

Vocab parse_vocab(const std::string& path) {
  return parse_vocab_text(read_file(path), path);
}

std::string vocab_to_json(const Vocab& vocab) {
  json j;
  j["categories"] = vocab.categories;
  j["predicates"] = vocab.predicates;
  return j.dump(2) + "\n";
}

void write_vocab(const std::string& path, const Vocab& vocab) {
  write_file(path, vocab_to_json(vocab));
}

namespace {

LayoutSample parse_sample_line(const json& j, const Vocab& vocab, BoxPolicy policy,
                               const std::string& where) {
  LayoutSample s;
  if (!j.is_object()) throw ParseError(where + ": record is not a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) throw ParseError(where + ": missing string \"id\"");
  s.id = j["id"].get<std::string>();

  const std::string ctx = where + " (sample \"" + s.id + "\")";
  if (!j.contains("width") || !j["width"].is_number_integer() || !j.contains("height") ||
      !j["height"].is_number_integer()) {
    throw ParseError(ctx + ": width/height must be integers");
  }
  s.image_width = j["width"].get<int>();
  s.image_height = j["height"].get<int>();

  if (!j.contains("objects") || !j["objects"].is_array()) {
    throw ParseError(ctx + ": missing \"objects\" array");
  }
  bool any_box = false;
  for (const auto& obj : j["objects"]) {
    if (!obj.is_object() || !obj.contains("category") || !obj["category"].is_string()) {
      throw ParseError(ctx + ": object entries need a string \"category\"");
    }
    const std::string name = obj["category"].get<std::string>();
    const auto cid = vocab.category_id(name);
    if (!cid) throw ParseError(ctx + ": unknown category \"" + name + "\"");
    s.graph.object_categories.push_back(*cid);

    if (obj.contains("box")) {
      const auto& b = obj["box"];
      if (!b.is_array() || b.size() != 4) throw ParseError(ctx + ": \"box\" must be [x,y,w,h]");
      for (const auto& v : b) {
        if (!v.is_number()) throw ParseError(ctx + ": non-numeric box coordinate");
      }
      s.boxes.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                         b[3].get<double>()});
      any_box = true;
    } else if (policy == BoxPolicy::required) {
      throw ParseError(ctx + ": object is missing its \"box\"");
    }
  }
  if (policy == BoxPolicy::optional && any_box &&
      s.boxes.size() != s.graph.object_categories.size()) {
    throw ParseError(ctx + ": either all objects carry boxes or none");
  }

  if (!j.contains("triplets") || !j["triplets"].is_array()) {
    throw ParseError(ctx + ": missing \"triplets\" array");
  }
  for (const auto& t : j["triplets"]) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_string() ||
        !t[2].is_number_integer()) {
      throw ParseError(ctx + ": triplets must be [subj_idx, predicate, obj_idx]");
    }
    const std::string pred = t[1].get<std::string>();
    const auto pid = vocab.predicate_id(pred);
    if (!pid) throw ParseError(ctx + ": unknown predicate \"" + pred + "\"");
    s.graph.triplets.push_back({t[0].get<int>(), *pid, t[2].get<int>()});
  }

  std::vector<std::string> violations =
      (policy == BoxPolicy::optional && s.boxes.empty())
          ? [&] {
              // For box-less prediction inputs, validate everything but the boxes.
              LayoutSample padded = s;
              padded.boxes.assign(padded.graph.object_categories.size(),
                                  BoundingBox{0.5, 0.5, 0.5, 0.5});
              return validate_sample(padded, vocab);
            }()
          : validate_sample(s, vocab);
  if (!violations.empty()) {
    std::ostringstream os;
    os << ctx << ": invariant violation: " << violations.front();
    if (violations.size() > 1) os << " (+" << violations.size() - 1 << " more)";
    throw ParseError(os.str());
  }
  return s;
}

}  // namespace

std::vector<LayoutSample> parse_samples_text(const std::string& text, const Vocab& vocab,
                                             BoxPolicy policy, const std::string& origin) {
  std::vector<LayoutSample> samples;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::ostringstream where;
    where << origin << ":" << line_no;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where.str() + ": " + e.what());
    }
    samples.push_back(parse_sample_line(j, vocab, policy, where.str()));
  }
  return samples;
}

std::vector<LayoutSample> parse_samples(const std::string& path, const Vocab& vocab,
                                        BoxPolicy policy) {
  return parse_samples_text(read_file(path), vocab, policy, path);
}

std::string serialize_sample(const LayoutSample& sample, const Vocab& vocab) {
  json j;
  j["id"] = sample.id;
  j["width"] = sample.image_width;
  j["height"] = sample.image_height;
  json objects = json::array();
  for (std::size_t i = 0; i < sample.graph.object_categories.size(); ++i) {
    json obj;
    const int cid = sample.graph.object_categories[i];
    obj["category"] = vocab.categories.at(static_cast<std::size_t>(cid));
    if (i < sample.boxes.size()) {
      const BoundingBox& b = sample.boxes[i];
      obj["box"] = {b.x, b.y, b.w, b.h};
    }
    objects.push_back(obj);
  }
  j["objects"] = objects;
  json triplets = json::array();
  for (const Triplet& t : sample.graph.triplets) {
    triplets.push_back(
        {t.subject, vocab.predicates.at(static_cast<std::size_t>(t.predicate)), t.object});
  }
  j["triplets"] = triplets;
  return j.dump();
}

std::string serialize_samples(const std::vector<LayoutSample>& samples, const Vocab& vocab) {
  std::string out;
  for (const auto& s : samples) {
    out += serialize_sample(s, vocab);
    out += '\n';
  }
  return out;
}

void write_samples(const std::string& path, const std::vector<LayoutSample>& samples,
                   const Vocab& vocab) {
  write_file(path, serialize_samples(samples, vocab));
}

}  // namespace sglayout
