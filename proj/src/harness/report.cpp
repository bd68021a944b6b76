#include "argmine/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#ifndef ARGMINE_VERSION
#define ARGMINE_VERSION "v0.0.0-unknown"
#endif

namespace argmine::harness {

using nlohmann::json;

std::string version_string() { return ARGMINE_VERSION; }

void write_report_atomic(const json& report, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write report: " + tmp.string());
        os << report.dump(2) << '\n';
        if (!os) throw std::runtime_error("report write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

json to_json(const MacroPrf& m) {
    json per_class = json::array();
    for (int c = 0; c < 3; ++c) {
        per_class.push_back({{"precision", round2(m.per_class_precision[c])},
                             {"recall", round2(m.per_class_recall[c])},
                             {"f1", round2(m.per_class_f1[c])}});
    }
    return {{"precision", round2(m.precision)},
            {"recall", round2(m.recall)},
            {"f1", round2(m.f1)},
            {"per_class", per_class}};
}

json to_json(const Confusion& c) {
    json rows = json::array();
    for (const auto& row : c) rows.push_back({row[0], row[1], row[2]});
    return rows;
}

json to_json(const EvalResult& e) {
    return {{"metrics", to_json(e.metrics)}, {"confusion", to_json(e.confusion)}};
}

json to_json(const RunResult& r) {
    return {{"epoch_losses", r.epoch_losses},
            {"val_f1_curve", r.val_f1_curve},
            {"best_epoch", r.best_epoch},
            {"total_steps", r.total_steps},
            {"validation", to_json(r.validation)},
            {"test", to_json(r.test)}};
}

json to_json(const MeanStd& ms) {
    return {{"mean", round2(ms.mean)}, {"std", round2(ms.std)}};
}

json to_json(const RepeatReport& r) {
    json runs = json::array();
    for (const auto& run : r.runs) runs.push_back(to_json(run));
    return {{"runs", runs},
            {"precision", to_json(r.precision)},
            {"recall", to_json(r.recall)},
            {"f1", to_json(r.f1)},
            {"single_run_std_flag", r.single_run}};
}

} // namespace argmine::harness
