#include "impress/example_systems.hpp"

#include <stdexcept>

namespace impress {

ImpulsiveSystem make_example(const std::string& id) {
    if (id == "rotation_circle") {
        return ImpulsiveSystem::continuous(Semiflow::rotation_circle(1.0));
    }
    if (id == "impulsive_circle") {
        JumpSet jumps{{StatePoint(0.5)}, 1e-6};
        ImpulseMap impulses{{{StatePoint(0.5), StatePoint(0.0)}}};
        return ImpulsiveSystem(Semiflow::rotation_circle(1.0), jumps, impulses, 0.1,
                               0.01);
    }
    if (id == "suspension_doubling") {
        return ImpulsiveSystem::continuous(Semiflow::suspension_doubling(1.0));
    }
    if (id == "translation_interval") {
        Space seg = Space::interval(0.0, 1.0);
        JumpSet jumps{{StatePoint(0.25)}, 1e-6};
        ImpulseMap impulses{{{StatePoint(0.25), StatePoint(0.75)}}};
        return ImpulsiveSystem(Semiflow::translation_interval(seg, 1.0), jumps,
                               impulses, 0.1, 0.01);
    }
    throw std::invalid_argument("unknown example system: " + id);
}

const std::vector<std::string>& example_ids() {
    static const std::vector<std::string> ids = {
        "rotation_circle", "impulsive_circle", "suspension_doubling",
        "translation_interval"};
    return ids;
}

}  // namespace impress
