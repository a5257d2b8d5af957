#pragma once

#include <iosfwd>
#include <string>

#include "ove/types.hpp"

namespace ove {

// Trajectory datasets serialize as JSON Lines: one trajectory per line,
// {"steps": [{"s": ..., "a": ..., "b_prob": ..., "r": ...}, ...]}.
// Doubles are written with shortest round-trip precision, so save followed
// by load reproduces every bit. Padding steps (s = a = -1, b_prob = 1, r = 0)
// are legal on disk.

void save_dataset_jsonl(const Dataset& data, std::ostream& out);
void save_dataset_jsonl(const Dataset& data, const std::string& path);

Dataset load_dataset_jsonl(std::istream& in, const ReturnSpec& spec);
Dataset load_dataset_jsonl(const std::string& path, const ReturnSpec& spec);

}  // namespace ove
