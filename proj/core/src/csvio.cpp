#include "twt/csvio.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <vector>

#include "twt/errors.hpp"

namespace twt::csvio {

const char* const kTimeSeriesHeader =
    "t,beta1,beta2,psi,psi_dot,ia1,ib1,ic1,omega1,ia2,ib2,ic2,omega2,theta_e1,theta_e2,"
    "delta_beta,van1,vbn1,vcn1,van2,vbn2,vcn2,"
    "id1,iq1,ih1,id2,iq2,ih2,"
    "torque_em1,torque_em2,torque_aero1,torque_aero2,drag1,drag2,"
    "wind_speed,wind_direction,fault_severity";

namespace {
constexpr int kColumns = 37;

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

std::vector<double> row_values(const sim::TimeSeries& ts, std::size_t k) {
    const plant::PlantState& x = ts.state[k];
    const plant::PlantInput& u = ts.input[k];
    const sim::DerivedSample& d = ts.derived[k];
    return {ts.t[k],
            x.beta1,
            x.beta2,
            x.psi,
            x.psi_dot,
            x.currents1[0],
            x.currents1[1],
            x.currents1[2],
            x.omega1,
            x.currents2[0],
            x.currents2[1],
            x.currents2[2],
            x.omega2,
            x.theta_e1,
            x.theta_e2,
            u.delta_beta,
            u.voltages1[0],
            u.voltages1[1],
            u.voltages1[2],
            u.voltages2[0],
            u.voltages2[1],
            u.voltages2[2],
            d.dq1.d,
            d.dq1.q,
            d.dq1.h,
            d.dq2.d,
            d.dq2.q,
            d.dq2.h,
            d.torque_em1,
            d.torque_em2,
            d.torque_aero1,
            d.torque_aero2,
            d.drag1,
            d.drag2,
            d.wind_speed,
            d.wind_direction,
            d.fault_severity};
}

double parse_double(std::string_view field, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw ConfigError("csv: bad numeric field on line " + std::to_string(line));
    return v;
}
}  // namespace

void write_timeseries(std::ostream& os, const sim::TimeSeries& ts) {
    if (ts.state.size() != ts.t.size() || ts.input.size() != ts.t.size() ||
        ts.derived.size() != ts.t.size())
        throw ConfigError("csv: time series columns have inconsistent lengths");
    os << kTimeSeriesHeader << '\n';
    std::string line;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        line.clear();
        const auto vals = row_values(ts, k);
        for (std::size_t j = 0; j < vals.size(); ++j) {
            if (j) line.push_back(',');
            append_double(line, vals[j]);
        }
        line.push_back('\n');
        os << line;
    }
}

void write_timeseries_file(const std::string& path, const sim::TimeSeries& ts) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    write_timeseries(f, ts);
}

sim::TimeSeries read_timeseries(std::istream& is) {
    sim::TimeSeries ts;
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("csv: empty stream");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTimeSeriesHeader) throw ConfigError("csv: header does not match the contract");

    std::size_t line_no = 1;
    std::vector<double> vals;
    vals.reserve(kColumns);
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        vals.clear();
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view field(line.data() + start,
                                         (comma == std::string::npos ? line.size() : comma) - start);
            vals.push_back(parse_double(field, line_no));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (vals.size() != kColumns)
            throw ConfigError("csv: expected " + std::to_string(kColumns) + " fields on line " +
                              std::to_string(line_no));

        ts.t.push_back(vals[0]);
        plant::PlantState x;
        x.beta1 = vals[1];
        x.beta2 = vals[2];
        x.psi = vals[3];
        x.psi_dot = vals[4];
        x.currents1 = {vals[5], vals[6], vals[7]};
        x.omega1 = vals[8];
        x.currents2 = {vals[9], vals[10], vals[11]};
        x.omega2 = vals[12];
        x.theta_e1 = vals[13];
        x.theta_e2 = vals[14];
        ts.state.push_back(x);
        plant::PlantInput u;
        u.delta_beta = vals[15];
        u.voltages1 = {vals[16], vals[17], vals[18]};
        u.voltages2 = {vals[19], vals[20], vals[21]};
        ts.input.push_back(u);
        sim::DerivedSample d;
        d.dq1 = {vals[22], vals[23], vals[24]};
        d.dq2 = {vals[25], vals[26], vals[27]};
        d.torque_em1 = vals[28];
        d.torque_em2 = vals[29];
        d.torque_aero1 = vals[30];
        d.torque_aero2 = vals[31];
        d.drag1 = vals[32];
        d.drag2 = vals[33];
        d.wind_speed = vals[34];
        d.wind_direction = vals[35];
        d.fault_severity = vals[36];
        ts.derived.push_back(d);
    }
    return ts;
}

sim::TimeSeries read_timeseries_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open: " + path);
    return read_timeseries(f);
}

void write_metrics(std::ostream& os, const sim::RunMetrics& m, const std::string& scenario_name) {
    std::string out;
    auto kv = [&](const char* key, double v) {
        out += key;
        out += " = ";
        append_double(out, v);
        out += '\n';
    };
    out += "scenario = \"" + scenario_name + "\"\n";
    out += std::string("status = \"") + sim::to_string(m.status) + "\"\n";
    out += std::string("diverged = ") + (m.diverged ? "true" : "false") + "\n";
    kv("fail_time", m.fail_time);
    kv("window_t0", m.window_t0);
    kv("window_t1", m.window_t1);
    kv("psi_error_max", m.psi_error_max);
    kv("omega1_error_rel_max", m.omega_error_rel_max[0]);
    kv("omega2_error_rel_max", m.omega_error_rel_max[1]);
    kv("id1_max", m.id_max[0]);
    kv("id2_max", m.id_max[1]);
    kv("ih1_max", m.ih_max[0]);
    kv("ih2_max", m.ih_max[1]);
    kv("phase_sum1_max", m.phase_sum_max[0]);
    kv("phase_sum2_max", m.phase_sum_max[1]);
    kv("phase_current1_peak", m.phase_current_peak[0]);
    kv("phase_current2_peak", m.phase_current_peak[1]);
    kv("healthy_phase_peak", m.healthy_phase_peak);
    kv("psi_settle_time", m.psi_settle_time);
    kv("omega1_settle_time", m.omega_settle_time[0]);
    kv("omega2_settle_time", m.omega_settle_time[1]);
    os << out;
}

void write_metrics_file(const std::string& path, const sim::RunMetrics& m,
                        const std::string& scenario_name) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    write_metrics(f, m, scenario_name);
}

}  // namespace twt::csvio
