#pragma once

#include <iosfwd>
#include <string>

#include "twt/simkit.hpp"

namespace twt::csvio {

/// Frozen column contract of the time-series CSV (one row per step). Values
/// are shortest round-trip decimals, so parse(emit(ts)) reproduces every
/// field bit for bit.
extern const char* const kTimeSeriesHeader;

void write_timeseries(std::ostream& os, const sim::TimeSeries& ts);
void write_timeseries_file(const std::string& path, const sim::TimeSeries& ts);

/// Throws ConfigError on a malformed file or a header mismatch.
sim::TimeSeries read_timeseries(std::istream& is);
sim::TimeSeries read_timeseries_file(const std::string& path);

void write_metrics(std::ostream& os, const sim::RunMetrics& m, const std::string& scenario_name);
void write_metrics_file(const std::string& path, const sim::RunMetrics& m,
                        const std::string& scenario_name);

}  // namespace twt::csvio
