#pragma once

#include "relhyp/rational.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace relhyp {

/// One constant with its provenance: either configured by the user or
/// measured on a named instance.
struct ParamValue {
    Rat value;
    bool measured = false;
    std::string instance;  // instance id when measured

    static ParamValue configured(Rat v) { return {std::move(v), false, ""}; }
    static ParamValue measured_on(Rat v, std::string inst) { return {std::move(v), true, std::move(inst)}; }
};

/// The constants the constructions run on. Names follow their roles:
/// delta (four-point hyperbolicity), D and C1 (projection tripod tracking),
/// C2 (edge-image quasiconvexity), P1..P7 and PP (projection/discrepancy
/// bounds), B (bounded penetration), K0..K2 and C0 (retraction cases).
struct GeometryParams {
    std::optional<ParamValue> delta;
    std::optional<ParamValue> D;
    std::optional<ParamValue> C1;
    std::optional<ParamValue> C2;
    std::optional<ParamValue> C_override;  // explicit C, must equal C1+C2 when all set
    std::optional<ParamValue> P1, P2, P3, P4, P5, P6, P7, PP;
    std::optional<ParamValue> B;
    std::optional<ParamValue> K0, K1, K2, C0;
    int depth = 0;  // horoball depth; 0 means per-space default

    /// D, defaulting to 4*delta + 1 when not configured.
    Rat effective_D() const {
        if (D) {
            if (D->value < 0) throw std::invalid_argument("GeometryParams: D must be >= 0");
            return D->value;
        }
        if (!delta) throw std::invalid_argument("GeometryParams: neither D nor delta available");
        return delta->value * 4 + 1;
    }

    /// C = C1 + C2, or the explicit override. A configured override takes
    /// precedence over measured components; two configured decompositions
    /// must agree exactly.
    Rat effective_C() const {
        if (C_override) {
            if (C1 && C2 && !C1->measured && !C2->measured &&
                C_override->value != C1->value + C2->value)
                throw std::invalid_argument("GeometryParams: configured C disagrees with configured C1 + C2");
            return C_override->value;
        }
        if (!C1 || !C2) throw std::invalid_argument("GeometryParams: C1 and C2 not available");
        return C1->value + C2->value;
    }

    /// Named snapshot of every present entry, for reports.
    std::map<std::string, ParamValue> snapshot() const;
};

}  // namespace relhyp
