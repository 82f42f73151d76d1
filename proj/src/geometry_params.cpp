#include "relhyp/geometry_params.hpp"

namespace relhyp {

std::map<std::string, ParamValue> GeometryParams::snapshot() const {
    std::map<std::string, ParamValue> snap;
    auto put = [&snap](const char* name, const std::optional<ParamValue>& v) {
        if (v) snap.emplace(name, *v);
    };
    put("delta", delta);
    put("D", D);
    put("C1", C1);
    put("C2", C2);
    put("C", C_override);
    put("P1", P1);
    put("P2", P2);
    put("P3", P3);
    put("P4", P4);
    put("P5", P5);
    put("P6", P6);
    put("P7", P7);
    put("PP", PP);
    put("B", B);
    put("K0", K0);
    put("K1", K1);
    put("K2", K2);
    put("C0", C0);
    return snap;
}

}  // namespace relhyp
