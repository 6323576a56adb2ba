#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "freeconv/convolution.hpp"
#include "freeconv/measure.hpp"

namespace freeconv::io {

Measure parse_measure(const nlohmann::json& doc);
Measure parse_measure_file(const std::string& path);

std::string format_double(double v);  // 17 significant digits

void write_density_csv(const std::string& path, const DensityTable& t);
nlohmann::json atoms_json(const std::vector<AtomRecord>& atoms);
nlohmann::json result_json(const SpectralResult& r);
void write_json(const std::string& path, const nlohmann::json& j);

// "<stem>.atoms.json" next to a density file
std::string atoms_path(const std::string& density_path);

// "0.75", "3/4", "2"
double parse_number(const std::string& s, long long* num = nullptr, long long* den = nullptr);

}  // namespace freeconv::io
