#pragma once

#include "ksurf/ksurfnet/lstm.hpp"

#include <filesystem>
#include <iosfwd>

namespace ksurf::ksurfnet {

/// Text checkpoint: `ksurfnet-checkpoint 1`, a dims line, a config line,
/// then every tensor at full precision and an `end` marker.
void save_checkpoint(std::ostream& out, const KsurfNet& net);
void save_checkpoint(const std::filesystem::path& path, const KsurfNet& net);
KsurfNet load_checkpoint(std::istream& in);
KsurfNet load_checkpoint(const std::filesystem::path& path);

const char* to_string(LstmInput kind);
LstmInput parse_lstm_input(const std::string& text);

}  // namespace ksurf::ksurfnet
