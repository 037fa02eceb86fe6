#pragma once

#include <filesystem>
#include <string>

#include "smre/core.hpp"

namespace smre::app {

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

// One value per line (1D) or comma-separated rows (2D, must be square).
SignalArray read_csv(const std::filesystem::path& path);
void write_csv(const SignalArray& s, const std::filesystem::path& path);

// Binary P5 with maxval up to 65535; 16-bit samples are big-endian.
SignalArray read_pgm(const std::filesystem::path& path);

// Affine map from pixel value back to the signal: x ~ offset + scale * pixel.
struct PgmScale {
  double offset = 0.0;
  double scale = 1.0;
};

// Writes an 8-bit image spanning [min, max] of the signal (2D only).
PgmScale write_pgm(const SignalArray& s, const std::filesystem::path& path);

// Dispatches on the extension: .pgm or .csv.
SignalArray read_signal(const std::filesystem::path& path);

}  // namespace smre::app
