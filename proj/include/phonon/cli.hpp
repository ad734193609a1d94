// Copyright 2026 The phonon-optics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver. Exit codes: 0 success, 1 parse or usage error,
// 2 runtime error, 3 I/O failure.

#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phonon/detection.hpp"
#include "phonon/fockspace.hpp"
#include "phonon/interferometer.hpp"
#include "phonon/seqlang.hpp"

namespace phonon::cli {

enum ExitCode : int { kOk = 0, kParseError = 1, kRuntimeError = 2, kIoError = 3 };

class IoError : public Error {
   public:
    using Error::Error;
};

struct RunOptions {
    std::string path;
    std::string format = "csv";
    std::string out_dir;
    double tail_tolerance = kDefaultTailTolerance;
};

struct SweepOptions {
    std::string state;
    int nmax = -1;
    std::string phi_min = "0";
    std::string phi_max = "2*pi";
    int points = 64;
    double fd_step = kDefaultFdStep;
    unsigned workers = 1;
    std::string out;
};

struct DetectOptions {
    std::string state;
    int nmax = -1;
    std::string method = "single";
    std::string mz_phi;  // empty: probe the state itself
    double coupling = 1.0;
    std::string span = "8*pi";
    int samples = 256;
    int m_max = 16;
    int k_max = -1;  // default: largest m n inside the truncation
    double chi_t = 1e-3;
    std::string out_dir;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path + "'");
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory '" + dir.string() + "'");
}

/// State-spec: the tail of an init statement, e.g. "coherent 0 0 2 0" or
/// "fock 1 0 nmax 4". A missing "nmax" clause is filled from nmax_flag.
inline MotionalState parse_state_spec(const std::string& spec, int nmax_flag, double tail_tolerance) {
    std::string text = seq::detail::lowercase(spec);
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos || text.compare(first, 5, "init ") != 0) text = "init " + text;
    if (text.find("nmax") == std::string::npos) {
        if (nmax_flag < 0) throw seq::ParseError(1, 1, "state-spec needs an nmax clause or --nmax");
        text += " nmax " + std::to_string(nmax_flag);
    }
    const auto prog = seq::parse(text);
    if (prog.statements.size() != 1) throw seq::ParseError(1, 1, "state-spec must be a single init clause");
    return seq::build_state(prog.init(), tail_tolerance);
}

inline double parse_angle_flag(const std::string& text, const char* name) {
    const auto a = seq::detail::to_angle(seq::detail::lowercase(text));
    if (!a) throw seq::ParseError(1, 1, std::string("invalid angle for ") + name + ": '" + text + "'");
    return a->radians;
}

inline nlohmann::json distribution_json(const JointDistribution& d) {
    nlohmann::json pmn = nlohmann::json::array();
    for (std::size_t i = 0; i < d.p_mn.size(); ++i) {
        const auto [m, n] = d.truncation.mode_numbers(i);
        pmn.push_back({m, n, d.p_mn[i]});
    }
    return {{"p_m", d.p_m}, {"p_n", d.p_n}, {"p_mn", std::move(pmn)}, {"mean_jz", d.mean_Jz}};
}

inline nlohmann::json record_json(const seq::Record& rec) {
    if (const auto* r = std::get_if<seq::StateReport>(&rec)) {
        return {{"type", "report"},         {"statement", r->statement},   {"line", r->line},
                {"mean_jx", r->mean_Jx},    {"mean_jy", r->mean_Jy},       {"mean_jz", r->mean_Jz},
                {"mean_jz2", r->mean_Jz2},  {"mean_nc", r->mean_Nc},       {"mean_nr", r->mean_Nr},
                {"tail_mass", r->tail_mass}, {"truncation_flagged", r->truncation_flagged},
                {"distribution", distribution_json(r->distribution)}};
    }
    if (const auto* t = std::get_if<seq::TraceReport>(&rec)) {
        return {{"type", "trace"}, {"statement", t->statement}, {"line", t->line}, {"kind", to_string(t->trace.kind)},
                {"coupling", t->trace.coupling}, {"t", t->trace.times}, {"p_g", t->trace.values}};
    }
    const auto& d = std::get<seq::DirectReport>(rec);
    auto j = to_json(d.estimate);
    j["type"] = "direct";
    j["statement"] = d.statement;
    j["line"] = d.line;
    return j;
}

inline std::string reports_csv(const std::vector<seq::Record>& records) {
    std::ostringstream os;
    os.precision(17);
    os << "statement,line,mean_jx,mean_jy,mean_jz,mean_jz2,mean_nc,mean_nr,tail_mass\n";
    for (const auto& rec : records) {
        if (const auto* r = std::get_if<seq::StateReport>(&rec)) {
            os << r->statement << ',' << r->line << ',' << r->mean_Jx << ',' << r->mean_Jy << ',' << r->mean_Jz << ','
               << r->mean_Jz2 << ',' << r->mean_Nc << ',' << r->mean_Nr << ',' << r->tail_mass << '\n';
        }
    }
    return os.str();
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

/// Parses and executes a .seq file. Stdout carries the report table (csv)
/// or every record (json); --out additionally writes one file per record.
inline int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    std::string text;
    try {
        text = detail::read_file(opt.path);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
    seq::PulseProgram prog;
    try {
        prog = seq::parse(text);
    } catch (const seq::ParseError& e) {
        err << opt.path << ':' << e.line() << ':' << e.column() << ": error: " << e.message() << '\n';
        return kParseError;
    }
    try {
        auto result = seq::execute(prog, opt.tail_tolerance);
        if (result.records.empty()) {
            result.records.push_back(seq::make_state_report(result.final_state, 0, prog.spans.front().line));
        }
        if (!opt.out_dir.empty()) {
            const std::filesystem::path dir(opt.out_dir);
            detail::ensure_dir(dir);
            detail::write_file(dir / "reports.csv", detail::reports_csv(result.records));
            for (const auto& rec : result.records) {
                if (const auto* r = std::get_if<seq::StateReport>(&rec)) {
                    std::ostringstream os;
                    write_distribution_csv(os, r->distribution);
                    detail::write_file(dir / ("statement" + std::to_string(r->statement) + "_distribution.csv"), os.str());
                } else if (const auto* t = std::get_if<seq::TraceReport>(&rec)) {
                    std::ostringstream os;
                    write_trace_csv(os, t->trace);
                    detail::write_file(dir / ("statement" + std::to_string(t->statement) + "_trace.csv"), os.str());
                } else {
                    const auto& d = std::get<seq::DirectReport>(rec);
                    detail::write_file(dir / ("statement" + std::to_string(d.statement) + "_direct.json"),
                                       detail::dump(detail::record_json(rec)));
                }
            }
            detail::write_file(dir / "final_state.json", detail::dump(to_json(result.final_state)));
        }
        if (opt.format == "json") {
            nlohmann::json records = nlohmann::json::array();
            for (const auto& rec : result.records) records.push_back(detail::record_json(rec));
            out << detail::dump({{"program", seq::format(prog)},
                                 {"records", std::move(records)},
                                 {"final_state", to_json(result.final_state)}});
        } else {
            out << detail::reports_csv(result.records);
        }
    } catch (const seq::RuntimeError& e) {
        err << opt.path << ':' << e.what() << '\n';
        return kRuntimeError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}

/// Mach-Zehnder phase sweep as CSV on stdout or into --out.
inline int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
    std::vector<InterferometerReport> rows;
    try {
        if (opt.points < 2) throw seq::ParseError(1, 1, "--points must be at least 2");
        const double lo = detail::parse_angle_flag(opt.phi_min, "--phi-min");
        const double hi = detail::parse_angle_flag(opt.phi_max, "--phi-max");
        const auto state = detail::parse_state_spec(opt.state, opt.nmax, kDefaultTailTolerance);
        rows = phase_sweep(state, phase_grid(lo, hi, static_cast<std::size_t>(opt.points)), opt.fd_step, opt.workers);
    } catch (const seq::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    if (opt.out.empty()) {
        out << csv.str();
        return kOk;
    }
    try {
        detail::write_file(opt.out, csv.str());
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
    return kOk;
}

/// Simulated detection: trace plus reconstruction (or direct estimates), and
/// the three-way <J_z> comparison. Prints one JSON document.
inline int cmd_detect(const DetectOptions& opt, std::ostream& out, std::ostream& err) {
    std::optional<MotionalState> state;
    double span = 0.0;
    try {
        if (opt.method != "single" && opt.method != "two" && opt.method != "direct") {
            throw seq::ParseError(1, 1, "--method must be single, two or direct");
        }
        const double mz_phi = opt.mz_phi.empty() ? 0.0 : detail::parse_angle_flag(opt.mz_phi, "--mz");
        span = detail::parse_angle_flag(opt.span, "--span");
        state = detail::parse_state_spec(opt.state, opt.nmax, kDefaultTailTolerance);
        if (!opt.mz_phi.empty()) state = mz_output(*state, mz_phi);
    } catch (const seq::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    try {
        nlohmann::json doc;
        doc["method"] = opt.method;
        JzMethodsConfig cfg;
        cfg.coupling = opt.coupling;
        cfg.span = span;
        cfg.samples = static_cast<std::size_t>(opt.samples);
        cfg.m_max = opt.m_max;
        cfg.chi_t = opt.chi_t;
        std::optional<SignalTrace> trace;
        nlohmann::json reconstruction;
        if (opt.method == "direct") {
            reconstruction = {{"c", to_json(direct_mean_phonon(*state, opt.chi_t, 1.0, Mode::CenterOfMass))},
                              {"r", to_json(direct_mean_phonon(*state, opt.chi_t, 1.0, Mode::Breathing))}};
        } else {
            const auto times = uniform_times(opt.coupling, span, static_cast<std::size_t>(opt.samples));
            if (opt.method == "single") {
                trace = signal(*state, opt.coupling, times, JcmKind::Single);
                reconstruction = to_json(reconstruct_single(*trace, opt.m_max));
            } else {
                const int half = state->truncation().n_total_max() / 2;
                const int k_max = opt.k_max >= 0 ? opt.k_max : half * (state->truncation().n_total_max() - half);
                trace = signal(*state, opt.coupling, times, JcmKind::Two);
                reconstruction = to_json(reconstruct_two(*trace, k_max));
            }
        }
        doc["reconstruction"] = reconstruction;
        doc["comparison"] = to_json(jz_from_methods(*state, cfg));
        if (!opt.out_dir.empty()) {
            const std::filesystem::path dir(opt.out_dir);
            detail::ensure_dir(dir);
            if (trace) {
                std::ostringstream os;
                write_trace_csv(os, *trace);
                detail::write_file(dir / "trace.csv", os.str());
            }
            detail::write_file(dir / "reconstruction.json", detail::dump(reconstruction));
        }
        out << detail::dump(doc);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}

/// Prints the canonical form of a .seq file.
inline int cmd_format(const std::string& path, std::ostream& out, std::ostream& err) {
    try {
        out << seq::format(seq::parse(detail::read_file(path)));
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const seq::ParseError& e) {
        err << path << ':' << e.line() << ':' << e.column() << ": error: " << e.message() << '\n';
        return kParseError;
    }
    return kOk;
}

inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-mode phonon optics simulator for trapped ions"};
    app.require_subcommand(1);
    int seed = 0;
    app.add_option("--seed", seed, "Reserved for measurement-noise models");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Execute a .seq pulse program");
    run_cmd->add_option("path", run.path, "Program file")->required();
    run_cmd->add_option("--format", run.format, "Stdout format")->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--out", run.out_dir, "Directory for per-record artifacts");
    run_cmd->add_option("--tail-tolerance", run.tail_tolerance, "Discarded probability before a state is flagged");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Mach-Zehnder phase sweep");
    sweep_cmd->add_option("--state", sweep.state, "State-spec, e.g. \"coherent 0 0 2 0\"")->required();
    sweep_cmd->add_option("--nmax", sweep.nmax, "Truncation when the state-spec has no nmax clause");
    sweep_cmd->add_option("--phi-min", sweep.phi_min, "First phase (radians or k*pi/n)");
    sweep_cmd->add_option("--phi-max", sweep.phi_max, "End of the half-open phase range");
    sweep_cmd->add_option("--points", sweep.points, "Grid size");
    sweep_cmd->add_option("--fd-step", sweep.fd_step, "Central-difference step in radians");
    sweep_cmd->add_option("--workers", sweep.workers, "Worker threads");
    sweep_cmd->add_option("--out", sweep.out, "Output CSV file (default stdout)");

    DetectOptions det;
    auto* det_cmd = app.add_subcommand("detect", "Simulated motional-state detection");
    det_cmd->add_option("--state", det.state, "State-spec")->required();
    det_cmd->add_option("--nmax", det.nmax, "Truncation when the state-spec has no nmax clause");
    det_cmd->add_option("--method", det.method, "single, two or direct");
    det_cmd->add_option("--mz", det.mz_phi, "Send the state through the interferometer at this phase first");
    det_cmd->add_option("--coupling", det.coupling, "Probe coupling (lambda or g), rad/s");
    det_cmd->add_option("--span", det.span, "Probe range of coupling * t");
    det_cmd->add_option("--samples", det.samples, "Number of probe times");
    det_cmd->add_option("--m-max", det.m_max, "Largest phonon number in the single-mode fit");
    det_cmd->add_option("--k-max", det.k_max, "Largest product m n in the two-mode fit");
    det_cmd->add_option("--chi-t", det.chi_t, "Conditional-phase angle of the direct readout");
    det_cmd->add_option("--out", det.out_dir, "Directory for trace.csv and reconstruction.json");

    std::string format_path;
    auto* fmt_cmd = app.add_subcommand("format", "Print the canonical form of a .seq file");
    fmt_cmd->add_option("path", format_path, "Program file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }
    if (*run_cmd) return cmd_run(run, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep, out, err);
    if (*det_cmd) return cmd_detect(det, out, err);
    return cmd_format(format_path, out, err);
}

}  // namespace phonon::cli
