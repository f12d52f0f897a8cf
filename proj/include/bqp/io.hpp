// JSON report serialization, time-path directory I/O, and small table
// helpers shared by the command-line driver and the tests.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "bqp/dynamics.hpp"
#include "bqp/grid.hpp"
#include "bqp/inviscid.hpp"
#include "bqp/minimization.hpp"
#include "bqp/stationary.hpp"

namespace bqp {

using json = nlohmann::json;

json json_of(const Params& P, double eps);
json json_of(const StationaryResult& r);
json json_of(const FixedPointResult& fp);
json json_of(const MinimizationReport& r);
json json_of(const ActionReport& r);
json json_of(const StaticDynamicRow& r);
json json_of(const StaticDynamicReport& r);
json json_of(const Thresholds& t);
json json_of(const InviscidMin& m);
json json_of(const TransitionReport& r);
json json_of(const BifurcationRow& r);
json json_of(const GammaScanRow& r);
json json_of(const GammaScanReport& r);

void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

// Directory layout: path.json manifest + frame_%06d.csv, one per stored
// frame.  stride > 1 stores every stride-th frame (first and last always).
void write_time_path(const std::string& dir, const TimePath& path,
                     const json& extra = json::object(), int stride = 1);
TimePath read_time_path(const std::string& dir);

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace bqp
