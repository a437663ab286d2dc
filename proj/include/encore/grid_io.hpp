#pragma once

#include <filesystem>

#include "encore/grid.hpp"

namespace encore {

// 8-bit binary PGM (P5). Images are stored with values in [0,1] scaled to
// 0..255; label masks store raw class indices (class count must fit a byte).
void write_pgm(const std::filesystem::path& path, const Grid& image);
Grid read_pgm(const std::filesystem::path& path);

void write_label_pgm(const std::filesystem::path& path, const LabelMask& mask);
LabelMask read_label_pgm(const std::filesystem::path& path);

// Debug dump: one CSV row per image row, one file section per channel.
void write_csv(const std::filesystem::path& path, const Grid& grid);

}  // namespace encore
