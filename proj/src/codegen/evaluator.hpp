#pragma once

// One walk over script expressions for both scalar types. The hooks decide
// what "is a scalar", how to invert and how to build a rotor; everything else
// is the shared algebra kernel.

#include <string>

#include "gavis/cga/construct.hpp"
#include "gavis/codegen/program.hpp"
#include "gavis/script/script.hpp"

namespace gavis::codegen::detail {

using script::BinaryOp;
using script::Expr;
using script::ExprKind;
using script::UnaryOp;

template <class S, class Hooks>
class Evaluator {
public:
    using M = Multivector<S>;

    Evaluator(Space space, Hooks& hooks) : space_(std::move(space)), hooks_(hooks) {}

    M eval(const Expr& e) {
        try {
            return eval_node(e);
        } catch (const ScriptError&) {
            throw;
        } catch (const Error& err) {
            throw ScriptError(err.code(), err.what(), e.span);
        }
    }

private:
    M scalar(S v) const { return M::scalar(space_, std::move(v)); }

    M basis(const std::string& name) const {
        if (name == "einf") return cga::einf<S>(space_);
        if (name == "e0") return cga::eo<S>(space_);
        int i = name[1] - '1';
        if (i >= static_cast<int>(space_->dimension()))
            throw Error("UnsupportedSpace", name + " is not a basis vector of " + space_->name);
        return M::basis_vector(space_, i);
    }

    M eval_node(const Expr& e) {
        switch (e.kind) {
        case ExprKind::Num: return scalar(ScalarTraits<S>::from(e.number));
        case ExprKind::Ident: return hooks_.lookup(e);
        case ExprKind::Basis: return basis(e.name);
        case ExprKind::Unary: {
            M a = eval(*e.args[0]);
            return e.unary == UnaryOp::Neg ? -a : reverse(a);
        }
        case ExprKind::Binary: {
            M a = eval(*e.args[0]);
            M b = eval(*e.args[1]);
            switch (e.binary) {
            case BinaryOp::Gp: return gp(a, b);
            case BinaryOp::Wedge: return wedge(a, b);
            case BinaryOp::Lcont: return lcont(a, b);
            case BinaryOp::Add: return a + b;
            case BinaryOp::Sub: return a - b;
            case BinaryOp::Div: return hooks_.divide(a, b, e);
            }
            break;
        }
        case ExprKind::Call: return call(e);
        }
        throw ScriptError("InvalidScript", "malformed expression", e.span);
    }

    S arg_scalar(const Expr& call, std::size_t i) {
        return hooks_.scalar_of(eval(*call.args[i]), *call.args[i], call.name);
    }

    M call(const Expr& e) {
        const script::BuiltinInfo* info = script::find_builtin(e.name);
        if (!info) throw ScriptError("UnknownFunction", "unknown function " + e.name, e.span);
        if (static_cast<int>(e.args.size()) != info->arity)
            throw ScriptError("ArityMismatch", e.name + " called with the wrong number of arguments", e.span);
        const std::string& f = e.name;
        if (f == "sqrt") return scalar(hooks_.sqrt(arg_scalar(e, 0)));
        if (f == "abs") return scalar(ScalarTraits<S>::abs(arg_scalar(e, 0)));
        if (f == "reverse") return reverse(eval(*e.args[0]));
        if (f == "dual") return dual(eval(*e.args[0]));
        if (f == "inverse") return hooks_.inverse(eval(*e.args[0]), e);
        if (f == "norm") return scalar(hooks_.norm(eval(*e.args[0])));
        if (f == "normalize") {
            M a = eval(*e.args[0]);
            S n = hooks_.norm(a);
            return a.map([&](Blade, const S& c) { return hooks_.div(c, n); });
        }
        if (f == "createPoint") {
            cga::require_cga(space_);
            return cga::embed_point<S>(space_, arg_scalar(e, 0), arg_scalar(e, 1), arg_scalar(e, 2));
        }
        if (f == "createSphere") {
            M c = eval(*e.args[0]);
            cga::require_cga(space_);
            return cga::sphere_ipns<S>(c, arg_scalar(e, 1));
        }
        if (f == "createPlane") {
            cga::require_cga(space_);
            S nx = arg_scalar(e, 0), ny = arg_scalar(e, 1), nz = arg_scalar(e, 2), d = arg_scalar(e, 3);
            S len = hooks_.sqrt(nx * nx + ny * ny + nz * nz);
            return cga::euclid_vector<S>(space_, hooks_.div(nx, len), hooks_.div(ny, len), hooks_.div(nz, len)) +
                   d * cga::einf<S>(space_);
        }
        if (f == "translator") {
            cga::require_cga(space_);
            return cga::translator<S>(space_, arg_scalar(e, 0), arg_scalar(e, 1), arg_scalar(e, 2));
        }
        if (f == "rotor") {
            M plane = eval(*e.args[0]);
            return hooks_.rotor(plane, arg_scalar(e, 1), e);
        }
        if (f == "project") {
            M a = eval(*e.args[0]);
            M b = eval(*e.args[1]);
            return gp(lcont(a, b), hooks_.inverse(b, e));
        }
        throw ScriptError("UnknownFunction", "unknown function " + e.name, e.span);
    }

    Space space_;
    Hooks& hooks_;
};

} // namespace gavis::codegen::detail
