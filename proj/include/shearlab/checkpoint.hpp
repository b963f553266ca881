#pragma once

#include "shearlab/dynamics.hpp"

#include <string>
#include <vector>

namespace shearlab {

// Binary checkpoint: 8-byte magic "SHLABCK1", uint64 header length, a JSON
// header (grid, time, tags, free-form metadata), then the raw little-endian
// doubles of each field (re, im interleaved in storage order).
struct Checkpoint {
    std::vector<SimState> states;
    std::string metadata_json = "{}";
};

void write_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::string& path);

// Write `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace shearlab
