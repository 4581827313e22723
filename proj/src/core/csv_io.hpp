#pragma once

#include <string>
#include <vector>

#include "core/types.hpp"

namespace imsprep {

// IMSC CSV layout:
//   line 1: "#imsc,rows=<R>,cols=<T>,retention_max=<s>,rim_max=<Vs/cm2>"
//   line 2: T comma-separated RIM axis coordinates
//   lines 3..R+2: retention coordinate followed by T intensity cells
// Values are written with 17 significant digits so read(write(m)) is
// bit-exact on the intensities. UTF-8, '.' decimal point, LF endings.
Imsc read_imsc(const std::string& path);
void write_imsc(const Imsc& imsc, const std::string& path);

// Peak list CSV, header "measurement,peak_id,retention_s,rim_vs_cm2,label";
// the label column is empty when the partition is unknown.
std::vector<PeakLocation> read_peaks(const std::string& path);
void write_peaks(const std::vector<PeakLocation>& peaks, const std::string& path);

// Shortest decimal representation that round-trips a double (%.17g).
std::string format_double(double value);

}  // namespace imsprep
