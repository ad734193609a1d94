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

// Line-oriented pulse-sequence language (.seq).
//
//   init (fock M N | coherent RE IM RE IM | cat RE IM (even|odd) (c|r)) nmax INT
//   bs1 ANGLE | bs2 ANGLE | ps (c|r) ANGLE | cphase (c|r) ANGLE
//   mz ANGLE | jcm (single|two) COUPLING T0 T1 NSAMPLES | direct (c|r) CHI_T | report
//
// One statement per line, '#' starts a comment, keywords are
// case-insensitive. ANGLE is a decimal number of radians or one of pi,
// pi/n, k*pi, k*pi/n with integers k and n > 0 (a leading '-' is allowed).
// format() emits canonical lowercase text; comments are not preserved.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "phonon/detection.hpp"
#include "phonon/error.hpp"
#include "phonon/fockspace.hpp"
#include "phonon/interferometer.hpp"
#include "phonon/operators.hpp"

namespace phonon::seq {

/// Largest accepted nmax; the state dimension grows as nmax^2 / 2.
inline constexpr int kMaxNmax = 200;

class ParseError : public Error {
   public:
    ParseError(int line, int column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

   private:
    int line_, column_;
    std::string message_;
};

class RuntimeError : public Error {
   public:
    RuntimeError(int line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

   private:
    int line_;
};

struct PiFraction {
    long numerator = 1;
    long denominator = 1;
    friend bool operator==(const PiFraction&, const PiFraction&) = default;
};

/// Angle in radians, remembering the rational multiple of pi it was written as.
struct Angle {
    double radians = 0.0;
    std::optional<PiFraction> pi_fraction;

    static Angle decimal(double v) { return {v, std::nullopt}; }
    static Angle pi_multiple(long k, long n) {
        return {static_cast<double>(k) * kPi / static_cast<double>(n), PiFraction{k, n}};
    }
    friend bool operator==(const Angle&, const Angle&) = default;
};

struct FockSpec {
    int m = 0, n = 0;
    friend bool operator==(const FockSpec&, const FockSpec&) = default;
};
struct CoherentSpec {
    cd alpha, beta;
    friend bool operator==(const CoherentSpec&, const CoherentSpec&) = default;
};
struct CatSpec {
    cd alpha;
    Parity parity = Parity::Even;
    Mode mode = Mode::CenterOfMass;
    friend bool operator==(const CatSpec&, const CatSpec&) = default;
};
using StateSpec = std::variant<FockSpec, CoherentSpec, CatSpec>;

struct InitStatement {
    StateSpec state;
    int nmax = 0;
    friend bool operator==(const InitStatement&, const InitStatement&) = default;
};
struct BeamSplitterStatement {
    BeamSplitterKind kind = BeamSplitterKind::B1;
    Angle theta;
    friend bool operator==(const BeamSplitterStatement&, const BeamSplitterStatement&) = default;
};
struct PhaseShiftStatement {
    Mode mode = Mode::CenterOfMass;
    Angle phi;
    friend bool operator==(const PhaseShiftStatement&, const PhaseShiftStatement&) = default;
};
struct ConditionalPhaseStatement {
    Mode mode = Mode::CenterOfMass;
    Angle chi_t;
    friend bool operator==(const ConditionalPhaseStatement&, const ConditionalPhaseStatement&) = default;
};
struct MachZehnderStatement {
    Angle phi;
    friend bool operator==(const MachZehnderStatement&, const MachZehnderStatement&) = default;
};
struct JcmStatement {
    JcmKind kind = JcmKind::Single;
    double coupling = 1.0;
    double t0 = 0.0, t1 = 1.0;
    int samples = 2;
    friend bool operator==(const JcmStatement&, const JcmStatement&) = default;
};
struct DirectStatement {
    Mode mode = Mode::CenterOfMass;
    Angle chi_t;
    friend bool operator==(const DirectStatement&, const DirectStatement&) = default;
};
struct ReportStatement {
    friend bool operator==(const ReportStatement&, const ReportStatement&) = default;
};

using Statement = std::variant<InitStatement, BeamSplitterStatement, PhaseShiftStatement, ConditionalPhaseStatement,
                               MachZehnderStatement, JcmStatement, DirectStatement, ReportStatement>;

struct SourceSpan {
    int line = 0;
    int column = 0;      // first character of the verb, 1-based
    int end_column = 0;  // one past the last character of the statement
};

struct PulseProgram {
    std::vector<Statement> statements;
    std::vector<SourceSpan> spans;

    const InitStatement& init() const { return std::get<InitStatement>(statements.front()); }
};

/// Equality of statement lists; source positions are ignored.
inline bool structurally_equal(const PulseProgram& a, const PulseProgram& b) { return a.statements == b.statements; }

// ---------------------------------------------------------------------------
// Lexing.

namespace detail {

struct Token {
    std::string text;  // lowercased
    int line = 0;
    int column = 0;
    int end_column = 0;
};

inline std::string lowercase(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

inline std::vector<std::vector<Token>> tokenize(std::string_view text) {
    std::vector<std::vector<Token>> lines;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        std::vector<Token> toks;
        std::size_t i = 0;
        while (i < line.size()) {
            const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
            if (is_space(line[i])) {
                ++i;
                continue;
            }
            const std::size_t start = i;
            while (i < line.size() && !is_space(line[i])) ++i;
            toks.push_back({lowercase(line.substr(start, i - start)), line_no, static_cast<int>(start) + 1,
                            static_cast<int>(i) + 1});
        }
        lines.push_back(std::move(toks));
        if (eol == text.size()) break;
        pos = eol + 1;
    }
    return lines;
}

inline std::optional<long> to_long(std::string_view s) {
    long v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || s.empty() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<Angle> to_angle(std::string_view s) {
    if (auto v = to_double(s)) return Angle::decimal(*v);
    bool negative = false;
    if (!s.empty() && s.front() == '-') {
        negative = true;
        s.remove_prefix(1);
    }
    long k = 1, n = 1;
    std::string_view rest;
    if (s.starts_with("pi")) {
        rest = s.substr(2);
    } else {
        const auto star = s.find("*pi");
        if (star == std::string_view::npos) return std::nullopt;
        const auto kv = to_long(s.substr(0, star));
        if (!kv || s.front() == '-') return std::nullopt;
        k = *kv;
        rest = s.substr(star + 3);
    }
    if (!rest.empty()) {
        if (rest.front() != '/') return std::nullopt;
        const auto nv = to_long(rest.substr(1));
        if (!nv || *nv <= 0) return std::nullopt;
        n = *nv;
    }
    return Angle::pi_multiple(negative ? -k : k, n);
}

class LineParser {
   public:
    explicit LineParser(const std::vector<Token>& toks) : toks_(toks) {}

    const Token& verb() const { return toks_.front(); }

    [[noreturn]] void fail_at(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.column, msg); }

    const Token& next(const char* what) {
        if (pos_ >= toks_.size()) fail_at(verb(), std::string("'") + verb().text + "' expects " + what);
        return toks_[pos_++];
    }

    void keyword(const char* word) {
        const auto& t = next((std::string("'") + word + "'").c_str());
        if (t.text != word) fail_at(t, std::string("expected '") + word + "', found '" + t.text + "'");
    }

    long integer(const char* what) {
        const auto& t = next(what);
        const auto v = to_long(t.text);
        if (!v) fail_at(t, std::string("expected integer ") + what + ", found '" + t.text + "'");
        return *v;
    }

    double number(const char* what) {
        const auto& t = next(what);
        const auto v = to_double(t.text);
        if (!v) fail_at(t, std::string("expected number ") + what + ", found '" + t.text + "'");
        return *v;
    }

    Angle angle(const char* what) {
        const auto& t = next(what);
        const auto v = to_angle(t.text);
        if (!v) fail_at(t, std::string("expected angle ") + what + " (radians or k*pi/n), found '" + t.text + "'");
        return *v;
    }

    Mode mode() {
        const auto& t = next("mode c or r");
        if (t.text == "c") return Mode::CenterOfMass;
        if (t.text == "r") return Mode::Breathing;
        fail_at(t, "expected mode 'c' or 'r', found '" + t.text + "'");
    }

    const Token& last() const { return toks_[pos_ - 1]; }

    void finish() const {
        if (pos_ < toks_.size()) fail_at(toks_[pos_], "unexpected extra argument '" + toks_[pos_].text + "'");
    }

   private:
    const std::vector<Token>& toks_;
    std::size_t pos_ = 1;
};

inline InitStatement parse_init(LineParser& p) {
    InitStatement init;
    const auto& kind = p.next("a state kind (fock, coherent or cat)");
    std::optional<Token> fock_token;
    if (kind.text == "fock") {
        fock_token = p.next("Fock index M");
        const auto m = to_long(fock_token->text);
        if (!m || *m < 0) p.fail_at(*fock_token, "expected non-negative integer M, found '" + fock_token->text + "'");
        const auto n = p.integer("N");
        if (n < 0) p.fail_at(p.last(), "Fock index N must be non-negative");
        init.state = FockSpec{static_cast<int>(*m), static_cast<int>(n)};
    } else if (kind.text == "coherent") {
        const double ar = p.number("Re(alpha)"), ai = p.number("Im(alpha)");
        const double br = p.number("Re(beta)"), bi = p.number("Im(beta)");
        init.state = CoherentSpec{{ar, ai}, {br, bi}};
    } else if (kind.text == "cat") {
        const double ar = p.number("Re(alpha)"), ai = p.number("Im(alpha)");
        const auto& par = p.next("parity even or odd");
        Parity parity;
        if (par.text == "even")
            parity = Parity::Even;
        else if (par.text == "odd")
            parity = Parity::Odd;
        else
            p.fail_at(par, "expected parity 'even' or 'odd', found '" + par.text + "'");
        const Mode mode = p.mode();
        init.state = CatSpec{{ar, ai}, parity, mode};
    } else {
        p.fail_at(kind, "unknown state kind '" + kind.text + "' (expected fock, coherent or cat)");
    }
    p.keyword("nmax");
    const long nmax = p.integer("nmax");
    if (nmax < 0 || nmax > kMaxNmax) {
        p.fail_at(p.last(), "nmax must lie in [0, " + std::to_string(kMaxNmax) + "], got " + std::to_string(nmax));
    }
    init.nmax = static_cast<int>(nmax);
    if (const auto* f = std::get_if<FockSpec>(&init.state); f && f->m + f->n > init.nmax) {
        p.fail_at(*fock_token, "Fock state |" + std::to_string(f->m) + "," + std::to_string(f->n) +
                                   "> exceeds nmax " + std::to_string(init.nmax));
    }
    return init;
}

inline Statement parse_statement(LineParser& p) {
    const auto& verb = p.verb().text;
    if (verb == "init") return parse_init(p);
    if (verb == "bs1") return BeamSplitterStatement{BeamSplitterKind::B1, p.angle("theta")};
    if (verb == "bs2") return BeamSplitterStatement{BeamSplitterKind::B2, p.angle("theta")};
    if (verb == "ps") {
        const Mode m = p.mode();
        return PhaseShiftStatement{m, p.angle("phi")};
    }
    if (verb == "cphase") {
        const Mode m = p.mode();
        return ConditionalPhaseStatement{m, p.angle("chi_t")};
    }
    if (verb == "mz") return MachZehnderStatement{p.angle("phi")};
    if (verb == "jcm") {
        const auto& k = p.next("probe kind single or two");
        JcmStatement j;
        if (k.text == "single")
            j.kind = JcmKind::Single;
        else if (k.text == "two")
            j.kind = JcmKind::Two;
        else
            p.fail_at(k, "expected probe kind 'single' or 'two', found '" + k.text + "'");
        j.coupling = p.number("coupling");
        if (!(j.coupling > 0.0)) p.fail_at(p.last(), "coupling must be positive");
        j.t0 = p.number("T0");
        j.t1 = p.number("T1");
        if (!(j.t1 > j.t0)) p.fail_at(p.last(), "T1 must exceed T0");
        const long ns = p.integer("NSAMPLES");
        if (ns < 2 || ns > 1000000) p.fail_at(p.last(), "NSAMPLES must lie in [2, 1000000]");
        j.samples = static_cast<int>(ns);
        return j;
    }
    if (verb == "direct") {
        const Mode m = p.mode();
        const Angle a = p.angle("chi_t");
        if (!(a.radians > 0.0)) p.fail_at(p.last(), "chi_t must be positive");
        return DirectStatement{m, a};
    }
    if (verb == "report") return ReportStatement{};
    p.fail_at(p.verb(), "unknown verb '" + verb + "'");
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_angle(const Angle& a) {
    if (!a.pi_fraction) return format_number(a.radians);
    const auto [k, n] = *a.pi_fraction;
    std::string s;
    if (k == 1)
        s = "pi";
    else if (k == -1)
        s = "-pi";
    else
        s = std::to_string(k) + "*pi";
    if (n != 1) s += "/" + std::to_string(n);
    return s;
}

}  // namespace detail

/// Parses a whole program. Throws ParseError with the line and column of the
/// offending token.
inline PulseProgram parse(std::string_view text) {
    PulseProgram prog;
    for (const auto& toks : detail::tokenize(text)) {
        if (toks.empty()) continue;
        detail::LineParser p(toks);
        Statement st = detail::parse_statement(p);
        p.finish();
        const bool is_init = std::holds_alternative<InitStatement>(st);
        if (prog.statements.empty() && !is_init) p.fail_at(p.verb(), "program must start with 'init'");
        if (!prog.statements.empty() && is_init) p.fail_at(p.verb(), "duplicate 'init'; only one is allowed");
        prog.statements.push_back(std::move(st));
        prog.spans.push_back({toks.front().line, toks.front().column, toks.back().end_column});
    }
    if (prog.statements.empty()) throw ParseError(1, 1, "missing 'init' statement");
    return prog;
}

inline std::string format_statement(const Statement& st) {
    using detail::format_angle;
    using detail::format_number;
    struct Visitor {
        std::string operator()(const InitStatement& s) const {
            std::string out = "init ";
            if (const auto* f = std::get_if<FockSpec>(&s.state)) {
                out += "fock " + std::to_string(f->m) + " " + std::to_string(f->n);
            } else if (const auto* c = std::get_if<CoherentSpec>(&s.state)) {
                out += "coherent " + format_number(c->alpha.real()) + " " + format_number(c->alpha.imag()) + " " +
                       format_number(c->beta.real()) + " " + format_number(c->beta.imag());
            } else {
                const auto& k = std::get<CatSpec>(s.state);
                out += "cat " + format_number(k.alpha.real()) + " " + format_number(k.alpha.imag()) + " " +
                       to_string(k.parity) + " " + to_string(k.mode);
            }
            return out + " nmax " + std::to_string(s.nmax);
        }
        std::string operator()(const BeamSplitterStatement& s) const {
            return (s.kind == BeamSplitterKind::B1 ? "bs1 " : "bs2 ") + format_angle(s.theta);
        }
        std::string operator()(const PhaseShiftStatement& s) const {
            return std::string("ps ") + to_string(s.mode) + " " + format_angle(s.phi);
        }
        std::string operator()(const ConditionalPhaseStatement& s) const {
            return std::string("cphase ") + to_string(s.mode) + " " + format_angle(s.chi_t);
        }
        std::string operator()(const MachZehnderStatement& s) const { return "mz " + format_angle(s.phi); }
        std::string operator()(const JcmStatement& s) const {
            return std::string("jcm ") + to_string(s.kind) + " " + format_number(s.coupling) + " " + format_number(s.t0) +
                   " " + format_number(s.t1) + " " + std::to_string(s.samples);
        }
        std::string operator()(const DirectStatement& s) const {
            return std::string("direct ") + to_string(s.mode) + " " + format_angle(s.chi_t);
        }
        std::string operator()(const ReportStatement&) const { return "report"; }
    };
    return std::visit(Visitor{}, st);
}

/// Canonical text: one lowercase statement per line, single spaces,
/// numbers with 17 significant digits.
inline std::string format(const PulseProgram& p) {
    std::string out;
    for (const auto& st : p.statements) out += format_statement(st) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Execution.

struct StateReport {
    std::size_t statement = 0;
    int line = 0;
    JointDistribution distribution;
    double mean_Jx = 0.0, mean_Jy = 0.0, mean_Jz = 0.0, mean_Jz2 = 0.0;
    double mean_Nc = 0.0, mean_Nr = 0.0;
    double tail_mass = 0.0;
    bool truncation_flagged = false;
};

struct TraceReport {
    std::size_t statement = 0;
    int line = 0;
    SignalTrace trace;
};

struct DirectReport {
    std::size_t statement = 0;
    int line = 0;
    DirectEstimate estimate;
};

using Record = std::variant<StateReport, TraceReport, DirectReport>;

struct ExecutionResult {
    std::vector<Record> records;
    MotionalState final_state;
};

inline MotionalState build_state(const InitStatement& init, double tail_tolerance = kDefaultTailTolerance) {
    const Truncation trunc(init.nmax);
    if (const auto* f = std::get_if<FockSpec>(&init.state)) return make_fock(f->m, f->n, trunc);
    if (const auto* c = std::get_if<CoherentSpec>(&init.state)) return make_coherent(c->alpha, c->beta, trunc, tail_tolerance);
    const auto& k = std::get<CatSpec>(init.state);
    return make_cat(k.alpha, k.parity, k.mode, trunc, tail_tolerance);
}

inline StateReport make_state_report(const MotionalState& s, std::size_t statement, int line) {
    StateReport r;
    r.statement = statement;
    r.line = line;
    r.distribution = number_distributions(s);
    r.mean_Jx = expect(s, Observable::Jx);
    r.mean_Jy = expect(s, Observable::Jy);
    r.mean_Jz = expect(s, Observable::Jz);
    r.mean_Jz2 = expect(s, Observable::Jz2);
    r.mean_Nc = expect(s, Observable::Nc);
    r.mean_Nr = expect(s, Observable::Nr);
    r.tail_mass = s.tail_mass();
    r.truncation_flagged = s.truncation_flagged();
    return r;
}

/// Threads a motional state through the program. cphase assumes ion 2 in
/// |g>, where it acts as a phase shift by chi_t / 2. jcm and direct record
/// their measurement and leave the state untouched.
inline ExecutionResult execute(const PulseProgram& prog, double tail_tolerance = kDefaultTailTolerance) {
    if (prog.statements.empty() || !std::holds_alternative<InitStatement>(prog.statements.front())) {
        throw RuntimeError(0, "program has no leading init statement");
    }
    std::optional<MotionalState> state;
    std::vector<Record> records;
    for (std::size_t i = 0; i < prog.statements.size(); ++i) {
        const int line = i < prog.spans.size() ? prog.spans[i].line : 0;
        try {
            const auto& st = prog.statements[i];
            if (const auto* s = std::get_if<InitStatement>(&st)) {
                state = build_state(*s, tail_tolerance);
            } else if (const auto* s = std::get_if<BeamSplitterStatement>(&st)) {
                state = apply(beam_splitter(s->kind, s->theta.radians, state->truncation()), *state);
            } else if (const auto* s = std::get_if<PhaseShiftStatement>(&st)) {
                state = apply(phase_shifter(s->mode, s->phi.radians, state->truncation()), *state);
            } else if (const auto* s = std::get_if<ConditionalPhaseStatement>(&st)) {
                auto js = JointState::product(std::nullopt, QubitState::ground(), *state);
                js = conditional_phase(s->mode, s->chi_t.radians, js);
                const auto motion = project_motion(js, std::nullopt, QubitState::ground()).first;
                state = state->with_amplitudes({motion.amplitudes().begin(), motion.amplitudes().end()});
            } else if (const auto* s = std::get_if<MachZehnderStatement>(&st)) {
                state = mz_output(*state, s->phi.radians);
            } else if (const auto* s = std::get_if<JcmStatement>(&st)) {
                std::vector<double> times(static_cast<std::size_t>(s->samples));
                for (int k = 0; k < s->samples; ++k) times[k] = s->t0 + (s->t1 - s->t0) * k / (s->samples - 1);
                records.push_back(TraceReport{i, line, signal(*state, s->coupling, times, s->kind)});
            } else if (const auto* s = std::get_if<DirectStatement>(&st)) {
                records.push_back(DirectReport{i, line, direct_mean_phonon(*state, s->chi_t.radians, 1.0, s->mode)});
            } else {
                records.push_back(make_state_report(*state, i, line));
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw RuntimeError(line, e.what());
        }
    }
    return {std::move(records), std::move(*state)};
}

}  // namespace phonon::seq
