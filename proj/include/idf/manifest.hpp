#pragma once

#include <string>

#include "idf/synth.hpp"

namespace idf::synth {

// Line-oriented key=value format, one "frame" record per image. Documented in
// the README; byte-stable so reruns can be compared by checksum.
void write_manifest(const std::string& path, const Manifest& m);
Manifest read_manifest(const std::string& path);

}  // namespace idf::synth
