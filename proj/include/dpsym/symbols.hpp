#pragma once

// Global symbol registry.  Polynomial variables are identified by VarId;
// the numeric value of the id fixes the variable order used everywhere
// (monomial comparisons, canonical forms, deterministic rendering):
//
//   n < a < b < c < d < e < mu < eps0 < (other identifiers) < u(0) < u(1) < ...
//
// Identifiers outside the built-in list are assigned increasing ids in
// first-use order; u(k) variables always sort last, ordered by k.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace dpsym {

using VarId = std::uint32_t;

class Symbols {
public:
    static constexpr VarId u_base = 1u << 20;

    static VarId n() { return 0; }

    static VarId u(long k) {
        if (k < 0) throw std::invalid_argument("u(k): k must be >= 0");
        return u_base + static_cast<VarId>(k);
    }

    static bool is_u(VarId v) { return v >= u_base; }
    static long u_index(VarId v) { return static_cast<long>(v - u_base); }

    /// Intern a named symbol ("n", parameters, internal helper symbols).
    static VarId intern(const std::string& name) {
        auto& st = state();
        auto it = st.by_name.find(name);
        if (it != st.by_name.end()) return it->second;
        VarId id = static_cast<VarId>(st.names.size());
        if (id >= u_base) throw std::runtime_error("symbol table overflow");
        st.names.push_back(name);
        st.by_name.emplace(name, id);
        return id;
    }

    static std::string name(VarId v) {
        if (is_u(v)) return "u(" + std::to_string(u_index(v)) + ")";
        auto& st = state();
        if (v >= st.names.size()) throw std::invalid_argument("unknown VarId");
        return st.names[v];
    }

    /// Shift map on variables: n and parameters are untouched, u(k) -> u(k+i).
    static VarId shifted(VarId v, long i) {
        if (!is_u(v)) return v;
        long k = u_index(v) + i;
        if (k < 0) throw std::invalid_argument("variable shift below u(0)");
        return u(k);
    }

private:
    struct State {
        std::vector<std::string> names;
        std::unordered_map<std::string, VarId> by_name;
        State() {
            // Built-ins in their canonical order; "n" must be id 0.
            for (const char* s : {"n", "a", "b", "c", "d", "e", "mu", "eps0"}) {
                by_name.emplace(s, static_cast<VarId>(names.size()));
                names.emplace_back(s);
            }
        }
    };
    static State& state() {
        static State st;
        return st;
    }
};

}  // namespace dpsym
