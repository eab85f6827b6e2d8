#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crkit {

enum class VarKind { Holomorphic, Antiholomorphic, Free };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Free;
    int partner = -1;  // index of the conjugate partner, -1 when unpaired

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// Ordered list of variables shared by every polynomial built over it.
/// The declared order is the variable order of the graded-lex monomial order.
class VarContext {
public:
    explicit VarContext(std::vector<Variable> vars) : vars_(std::move(vars)) {
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            int p = vars_[i].partner;
            if (p < 0) continue;
            if (p >= static_cast<int>(vars_.size()) || vars_[p].partner != static_cast<int>(i))
                throw std::invalid_argument("inconsistent conjugation pairing for " + vars_[i].name);
        }
    }

    /// z1..zn holomorphic followed by zb1..zbn, zk paired with zbk.
    static std::shared_ptr<const VarContext> paired(int n) {
        std::vector<Variable> v;
        v.reserve(2 * n);
        for (int k = 0; k < n; ++k) v.push_back({"z" + std::to_string(k + 1), VarKind::Holomorphic, n + k});
        for (int k = 0; k < n; ++k) v.push_back({"zb" + std::to_string(k + 1), VarKind::Antiholomorphic, k});
        return std::make_shared<const VarContext>(std::move(v));
    }

    static std::shared_ptr<const VarContext> make(std::vector<Variable> v) {
        return std::make_shared<const VarContext>(std::move(v));
    }

    std::size_t size() const { return vars_.size(); }
    const Variable& var(std::size_t i) const { return vars_.at(i); }
    const std::vector<Variable>& vars() const { return vars_; }

    std::optional<int> index_of(const std::string& name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name == name) return static_cast<int>(i);
        return std::nullopt;
    }

    friend bool operator==(const VarContext& a, const VarContext& b) { return a.vars_ == b.vars_; }

private:
    std::vector<Variable> vars_;
};

using Ctx = std::shared_ptr<const VarContext>;

inline bool same_context(const Ctx& a, const Ctx& b) { return a == b || (a && b && *a == *b); }

}  // namespace crkit
