#pragma once

// Data-driven identity catalog.  Entries live in share/catalog/*.json, one
// file per suite (symbolic, covariance, models), and are executed against
// the symbolic engine, the conformal transform, or the exact models.  Each
// entry carries an anchor string describing the identity in plain words so
// failure reports are auditable without the data file.

#include "cr/calculus.hpp"

namespace cr {

struct CatalogError : std::runtime_error {
    explicit CatalogError(const std::string& m) : std::runtime_error(m) {}
};

struct CatalogEntry {
    std::string suite;  // symbolic | covariance | models
    std::string id;
    std::string anchor;

    // verify     closure of lhs - rhs vanishes (or matches expectResidual)
    // covariant  like verify, but lhs passes through the conformal transform
    // divisible  every coefficient of closure(lhs) divisible by (n-root)^power
    // limit      limits at n=at of the closures of lhs and rhs agree
    // model      named exact-model routine
    std::string mode = "verify";

    std::string lhs, rhs = "0";
    std::vector<std::string> constraints;  // "pluriharmonic:u" | "pseudoEinstein"
    int dim = 1;
    std::string sigma = "sigma";    // conformal factor symbol for covariant mode
    std::string expectResidual;     // nonempty: pass iff the residual equals this

    Rat root{1};
    int power = 1;
    Rat at{1};
    int lhsDim = -1, rhsDim = -1;   // default: dim

    // model mode
    std::string routine;
    std::string model = "sphere";   // sphere | heisenberg | both
    std::string f;                  // ring element source where applicable
    std::vector<std::string> sigmas;  // conformal factors (ring element sources)
    int degree = 4;
    std::string expectValue;        // exact value a routine must reproduce
};

struct CatalogReport {
    std::string id, anchor;
    std::string status;       // pass | fail | error
    std::string residual;     // canonical nonzero residual, or the matched one
    std::string exactValue;   // exact model values where meaningful
    double seconds = 0;
};

// compiled-in share/catalog path, overridable with the CR_CATALOG_DIR
// environment variable
std::string defaultCatalogDir();

std::vector<CatalogEntry> loadCatalogFile(const std::string& path,
                                          const std::string& suite);
// all suites in fixed order: symbolic, covariance, models
std::vector<CatalogEntry> loadCatalog(const std::string& dir);

// sigmaOverride replaces the sigma set of a model entry (CLI --sigma)
CatalogReport runEntry(const CatalogEntry& e,
                       const std::string& sigmaOverride = "");

}  // namespace cr
