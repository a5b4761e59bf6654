#pragma once

#include <poldoa/complexity.hpp>
#include <poldoa/experiments.hpp>
#include <poldoa/spectrum.hpp>

#include <string>
#include <vector>

namespace poldoa {

/// Fixed-format number for tables: "%.10g", "nan" for NaN.
std::string format_number(double x);

std::string format_rmse_csv(const RmseTable& table);
std::string format_crb_csv(const std::vector<CrbRow>& rows);
std::string format_ambiguity_csv(const AmbiguityReport& report);
std::string format_complexity_csv(std::int64_t N, std::int64_t M, std::int64_t L,
                                  const ComplexityCounts& counts);

/// One line per node: axis coordinates (degrees) then the clipped value.
std::string format_spectrum_csv(const SpectrumGrid& spectrum);
/// Axis metadata, cap and peak summary as JSON.
std::string format_spectrum_json(const SpectrumGrid& spectrum, const std::string& description);

/// Writes text to path; throws Error naming the path on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace poldoa
