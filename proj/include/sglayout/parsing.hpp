#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sglayout/types.hpp"

namespace sglayout {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vocab file: JSON object {"categories": [...], "predicates": [...]}.
// Duplicate names are rejected.
Vocab parse_vocab(const std::string& path);
Vocab parse_vocab_text(const std::string& text, const std::string& origin = "<string>");

std::string vocab_to_json(const Vocab& vocab);
void write_vocab(const std::string& path, const Vocab& vocab);

enum class BoxPolicy {
  required,  // every object must carry a box (training corpora)
  optional,  // boxes may be absent on all objects of a sample (prediction inputs)
};

// Sample file: JSON Lines, one sample per line:
//   {"id": str, "width": int, "height": int,
//    "objects": [{"category": str, "box": [x,y,w,h]}, ...],
//    "triplets": [[subj_idx, predicate_str, obj_idx], ...]}
// Every sample is validated against the type invariants and the vocabulary;
// errors carry the line number and, where known, the sample id.
std::vector<LayoutSample> parse_samples(const std::string& path, const Vocab& vocab,
                                        BoxPolicy policy = BoxPolicy::required);
std::vector<LayoutSample> parse_samples_text(const std::string& text, const Vocab& vocab,
                                             BoxPolicy policy = BoxPolicy::required,
                                             const std::string& origin = "<string>");

// One JSON line per sample, exactly the schema parse_samples reads.
std::string serialize_sample(const LayoutSample& sample, const Vocab& vocab);
std::string serialize_samples(const std::vector<LayoutSample>& samples, const Vocab& vocab);
void write_samples(const std::string& path, const std::vector<LayoutSample>& samples,
                   const Vocab& vocab);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sglayout
