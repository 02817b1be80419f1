#pragma once

#include <string>

#include "sglayout/model.hpp"
#include "sglayout/types.hpp"

namespace sglayout {

// Serializes the model (dims, vocabulary, every named parameter) to a single
// JSON file. Values survive a save/load round trip bit-identically. Throws
// when `vocab` is not the vocabulary the model was built with.
void save_checkpoint(const LayoutModel& model, const Vocab& vocab, const std::string& path);

struct Checkpoint {
  LayoutModel model;
  Vocab vocab;
};

// Loads a checkpoint saved by save_checkpoint, with its embedded vocabulary.
// Throws std::runtime_error when the file is unreadable, malformed, the
// stored fingerprint does not match the stored vocabulary, or shapes
// disagree with the stored dims.
Checkpoint load_checkpoint(const std::string& path);

// Same, but additionally requires the embedded vocabulary to match `vocab`.
LayoutModel load_checkpoint(const std::string& path, const Vocab& vocab);

}  // namespace sglayout
