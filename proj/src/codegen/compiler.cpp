#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "evaluator.hpp"
#include "gavis/codegen/program.hpp"
#include "gavis/script/script.hpp"

namespace gavis::codegen {

namespace {

using SMv = Multivector<ScalarExpr>;
using script::Diagnostic;
using script::Severity;

constexpr int kProbeSamples = 20;
constexpr int kProbeCandidates = 200;
constexpr double kProbeRange = 2.0;
constexpr double kProbeJitter = 0.05;
constexpr std::uint64_t kProbeSeed = 0x9e3779b97f4a7c15ull;

// Random bindings carried through the program as steps are emitted, so any
// expression over inputs and earlier temporaries can be sampled.
class Prober {
public:
    // Odd candidates jitter around the script's own parameter values, where
    // the geometry is known to be well-posed (e.g. spheres that do meet).
    Prober(const std::vector<std::string>& inputs, const std::vector<std::pair<std::string, double>>& defaults) {
        std::mt19937_64 rng(kProbeSeed);
        std::uniform_real_distribution<double> dist(-kProbeRange, kProbeRange);
        std::uniform_real_distribution<double> jitter(-kProbeJitter, kProbeJitter);
        Bindings centre(defaults.begin(), defaults.end());
        samples_.resize(kProbeCandidates);
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            bool near = i % 2 == 1 && !centre.empty();
            for (const auto& in : inputs) {
                auto it = centre.find(in);
                samples_[i][in] = near && it != centre.end() ? it->second + jitter(rng) : dist(rng);
            }
        }
    }

    /// Values at the first kProbeSamples candidates that evaluate cleanly;
    /// empty when too few do.
    std::vector<double> probe(const ScalarExpr& e) const {
        std::vector<double> out;
        for (const auto& s : samples_) {
            try {
                out.push_back(evaluate(e, s));
            } catch (const Error&) {
                continue;
            }
            if (out.size() == kProbeSamples) return out;
        }
        return {};
    }

    void record_step(const std::string& name, const ScalarExpr& e) {
        std::vector<Bindings> alive;
        for (auto& s : samples_) {
            try {
                double v = evaluate(e, s);
                if (!std::isfinite(v)) continue;
                s[name] = v;
                alive.push_back(std::move(s));
            } catch (const Error&) {
            }
        }
        samples_ = std::move(alive);
    }

private:
    std::vector<Bindings> samples_;
};

class Compiler {
public:
    Compiler(const script::ScriptAst& ast, Space space) : ast_(ast), space_(std::move(space)) {}

    BladeProgram run() {
        auto diags = script::validate(ast_);
        for (const auto& d : diags)
            if (d.severity == Severity::Error) throw ScriptError("InvalidScript", d.message, d.span);
        if (!space_) throw Error("UnknownSpace", "no algebra given");

        script::ScriptSymbols sym = script::analyze(ast_);
        prog_.space = space_;
        prog_.inputs = sym.inputs;
        prog_.defaults = sym.bindings;
        std::set<std::string> variables(sym.variables.begin(), sym.variables.end());
        prober_ = std::make_unique<Prober>(sym.inputs, sym.bindings);

        for (const auto& stmt : ast_.statements) {
            if (auto* a = std::get_if<script::AssignStmt>(&stmt)) {
                if (!variables.contains(a->name)) continue;  // parameter binding
                assign(*a);
            } else if (auto* d = std::get_if<script::DrawStmt>(&stmt)) {
                prog_.draws.push_back({d->name, d->color});
            }
        }

        std::set<std::string> wanted(sym.optimized.begin(), sym.optimized.end());
        wanted.insert(sym.drawn.begin(), sym.drawn.end());
        for (const auto& v : sym.variables) {
            if (!wanted.contains(v)) continue;
            OutputInfo out{v, {}};
            for (const auto& [b, c] : env_.at(v).terms()) out.blades.push_back(b);
            prog_.outputs.push_back(std::move(out));
        }
        return std::move(prog_);
    }

    // Hooks used by the evaluator.
    SMv lookup(const script::Expr& e) {
        auto it = env_.find(e.name);
        if (it != env_.end()) return it->second;
        if (script::is_input_name(e.name)) return SMv::scalar(space_, ScalarExpr::var(e.name));
        throw ScriptError("UndefinedIdentifier", "undefined identifier " + e.name, e.span);
    }

    ScalarExpr scalar_of(const SMv& m, const script::Expr& where, const std::string& fn) {
        SMv r = eliminate(m, "", where.span);
        for (const auto& [b, c] : r.terms())
            if (!b.is_scalar())
                throw ScriptError("NonScalarArgument", fn + " expects a scalar argument", where.span);
        return r.scalar_part();
    }

    ScalarExpr sqrt(const ScalarExpr& v) { return make_sqrt(v); }
    ScalarExpr div(const ScalarExpr& a, const ScalarExpr& b) { return make_div(a, b); }
    ScalarExpr norm(const SMv& a) { return make_sqrt(make_abs(simplify(gp(a, reverse(a)).scalar_part()))); }

    SMv inverse(const SMv& b, const script::Expr& where) {
        SMv p = eliminate(gp(b, reverse(b)), "", where.span);
        for (const auto& [bl, c] : p.terms())
            if (!bl.is_scalar())
                throw ScriptError("SymbolicDivisionByNonScalar",
                                  "divisor times its reverse is not a scalar; no closed-form inverse", where.span);
        ScalarExpr d = p.scalar_part();
        return reverse(b).map([&](Blade, const ScalarExpr& c) { return make_div(c, d); });
    }

    SMv divide(const SMv& a, const SMv& b, const script::Expr& where) {
        SMv den = eliminate(b, "", where.span);
        bool scalar_only = std::all_of(den.terms().begin(), den.terms().end(),
                                       [](const auto& t) { return t.first.is_scalar(); });
        if (scalar_only) {
            ScalarExpr d = den.scalar_part();
            return a.map([&](Blade, const ScalarExpr& c) { return make_div(c, d); });
        }
        return gp(a, inverse(den, where));
    }

    SMv rotor(const SMv& plane, const ScalarExpr& angle, const script::Expr& where) {
        SMv sq = eliminate(gp(plane, plane), "", where.span);
        bool unit = std::all_of(sq.terms().begin(), sq.terms().end(),
                                [](const auto& t) { return t.first.is_scalar(); });
        if (unit) {
            ScalarExpr s = simplify(sq.scalar_part() + ScalarExpr(1.0));
            if (!s.is_const(0.0)) {
                auto vals = prober_->probe(s);
                unit = !vals.empty() && std::all_of(vals.begin(), vals.end(), [](double v) { return std::abs(v) <= 1e-9; });
            }
        }
        if (!unit) throw ScriptError("RotorPlaneNotUnit", "rotor plane must be a bivector squaring to -1", where.span);
        ScalarExpr half = make_mul({ScalarExpr(0.5), angle});
        return SMv::scalar(space_, make_cos(half)) - plane * make_sin(half);
    }

private:
    void warn(std::string code, std::string msg, script::Span span) {
        prog_.warnings.push_back({Severity::Warning, std::move(code), std::move(msg), span});
    }

    // Drops blades whose coefficient simplifies to 0 or samples as 0.
    SMv eliminate(const SMv& m, const std::string& var, script::Span span) {
        SMv out(m.space() ? m.space() : space_);
        for (const auto& [b, c] : m.terms()) {
            ScalarExpr e = simplify(c);
            if (e.is_const(0.0)) {
                if (!var.empty()) prog_.eliminated.push_back({var, b, c, prog_.steps.size()});
                continue;
            }
            if (!e.is_const()) {
                auto vals = prober_->probe(e);
                if (vals.empty()) {
                    warn("ProbeIncomplete",
                         "could not sample coefficient of " + blade_name(b) + (var.empty() ? "" : " in " + var) +
                             "; blade kept",
                         span);
                } else if (std::all_of(vals.begin(), vals.end(), [](double v) { return std::abs(v) <= kZeroTolerance; })) {
                    if (!var.empty()) prog_.eliminated.push_back({var, b, c, prog_.steps.size()});
                    continue;
                }
            }
            out.add_term(b, e);
        }
        return out;
    }

    void assign(const script::AssignStmt& a) {
        detail::Evaluator<ScalarExpr, Compiler> ev(space_, *this);
        SMv value = eliminate(ev.eval(*a.expr), a.name, a.span);
        if (value.is_zero()) warn("EmptyMultivector", a.name + " has no nonzero blades", a.span);
        SMv stored(space_);
        for (const auto& [b, c] : value.terms()) {
            std::string step = a.name + "_" + std::to_string(b.bits);
            prog_.steps.push_back({step, a.name, b, c});
            prober_->record_step(step, c);
            stored.add_term(b, c.is_const() ? c : ScalarExpr::var(step));
        }
        env_[a.name] = std::move(stored);
    }

    const script::ScriptAst& ast_;
    Space space_;
    BladeProgram prog_;
    std::map<std::string, SMv> env_;
    std::unique_ptr<Prober> prober_;
};

} // namespace

BladeProgram compile(const script::ScriptAst& ast, const Space& space) { return Compiler(ast, space).run(); }

} // namespace gavis::codegen
