// Catalog-driven verification CLI.
//
//   crverify list
//   crverify verify [--suite all] [--identity GLOB] [--sigma SRC]
//   crverify apply --op NAME --model NAME [--f SRC] [--sigma SRC]
//
// verify emits one machine-readable JSON record per entry, in catalog order,
// and exits nonzero iff some entry failed.

#include "cr/catalog.hpp"
#include "cr/models/models.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fnmatch.h>
#include <iostream>

using namespace cr;

namespace {

int runVerify(const std::string& suite, const std::string& pattern,
              const std::string& sigma) {
    auto entries = loadCatalog(defaultCatalogDir());
    bool matched = false, allPass = true;
    for (const auto& e : entries) {
        if (suite != "all" && e.suite != suite) continue;
        if (!pattern.empty() &&
            fnmatch(pattern.c_str(), e.id.c_str(), 0) != 0)
            continue;
        matched = true;
        CatalogReport r = runEntry(e, e.mode == "model" ? sigma : "");
        nlohmann::ordered_json rec;
        rec["id"] = r.id;
        rec["anchor"] = r.anchor;
        rec["status"] = r.status;
        if (!r.residual.empty()) rec["residual"] = r.residual;
        if (!r.exactValue.empty()) rec["exact_value"] = r.exactValue;
        rec["duration"] = r.seconds;
        std::cout << rec.dump() << "\n";
        if (r.status != "pass") allPass = false;
    }
    if (!matched) {
        std::cerr << "unknown identity: " << pattern << "\n";
        return 2;
    }
    return allPass ? 0 : 1;
}

int runApply(const std::string& op, const std::string& model,
             const std::string& f, const std::string& sigma) {
    Model m;
    if (model == "sphere") {
        m = Model::Sphere;
    } else if (model == "heisenberg") {
        m = Model::Heisenberg;
    } else {
        std::cerr << "unknown model: " << model << "\n";
        return 2;
    }
    Structure s = standardStructure(m);
    if (!sigma.empty() && sigma != "0")
        s = conformalStructure(s, parseRing(sigma, m));
    RingEl arg = f.empty() ? ringConst(m, K(1)) : parseRing(f, m);
    std::cout << applyOperator(op, arg, s).str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact identity verification for the fourth order CR calculus"};
    app.require_subcommand(1);

    std::string suite = "all", identity, sigma, op, model, f;

    auto* verify = app.add_subcommand("verify", "run catalog entries");
    verify->add_option("--suite", suite, "all, symbolic, covariance, or models")
        ->check(CLI::IsMember({"all", "symbolic", "covariance", "models"}));
    verify->add_option("--identity", identity, "glob over entry ids");
    verify->add_option("--sigma", sigma, "conformal factor for model entries");

    auto* apply = app.add_subcommand("apply", "apply an operator on a model");
    apply->add_option("--op", op, "operator name")->required();
    apply->add_option("--model", model, "sphere or heisenberg")->required();
    apply->add_option("--f", f, "argument (default 1)");
    apply->add_option("--sigma", sigma, "conformal factor");

    auto* list = app.add_subcommand("list", "dump the catalog with anchors");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return runVerify(suite, identity, sigma);
        if (apply->parsed()) return runApply(op, model, f, sigma);
        if (list->parsed()) {
            for (const auto& e : loadCatalog(defaultCatalogDir()))
                std::cout << e.suite << "/" << e.id << ": " << e.anchor << "\n";
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
