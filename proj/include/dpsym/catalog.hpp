#pragma once

// Built-in registry of the five second-order rational difference equations
// this library studies, organized as parameter families split into named
// branches.  Each branch carries its instantiated equation, the symmetry
// generators known for it, the explicit solutions attached to it, and notes
// recording where the published derivations and the exact computations in
// this library part ways.  All data is static and read-only after the first
// access; every generator listed here is expected to pass exact symbolic
// verification under its branch (the test suite enforces this), and every
// solution tagged "audit" has a deterministic verdict pinned by a golden
// report.

#include <string>
#include <vector>

#include "dpsym/eqmodel.hpp"
#include "dpsym/symmetry.hpp"

namespace dpsym {

/// One named symmetry generator of a branch equation.
struct CatalogGenerator {
    std::string name;        ///< display name, "X1".."X7"
    std::string anchor;      ///< catalog-internal anchor, e.g. "dP3/reciprocal_case/X5"
    SymmetryGenerator gen;   ///< provenance field repeats the anchor
};

/// One explicit solution attached to a branch.
///
/// expected_verdict semantics:
///   "verified" -- the solution is exact; the test suite re-derives it
///                 through the reduction pipeline and checks it against the
///                 equation step by step.
///   "audit"    -- the solution is transcribed verbatim from its published
///                 display and fails re-derivation; the audit machinery
///                 (audit_solution_formula) produces a deterministic mismatch
///                 report pinned by a golden file.
struct CatalogSolution {
    std::string formula_id;        ///< builtin_solution_formulas id, or catalog-internal id
    std::string branch;            ///< formula branch ("principal", "conjugate", "-", ...)
    std::string expected_verdict;  ///< "verified" | "audit"
    std::string note;
};

/// A parameter branch of a family: named assumption set plus everything the
/// library knows about the specialized equation.
struct CatalogBranch {
    std::string name;  ///< e.g. "a_nonzero", "zero", "reciprocal_case", "bcase", "general", "default"

    /// Assumptions over the *family* parameters that define the branch
    /// (e.g. "b=a*d", "a!=0"); used by catalog_instantiate to reject
    /// contradictory refinements.
    std::vector<Assumption> branch_assumptions;

    /// Fully instantiated branch equation: pinned parameters are substituted
    /// away, surviving inequations are carried in equation.assumptions.
    DifferenceEquation equation;

    std::vector<CatalogGenerator> generators;
    std::vector<CatalogSolution> solutions;
    std::vector<std::string> notes;
};

/// A family entry: the unrestricted equation text plus its branches.
struct CatalogEntry {
    std::string id;           ///< "dP1".."dP5"
    std::string family_text;  ///< omega of the full parameter family
    int order = 2;
    std::vector<std::string> parameters;  ///< family parameter names
    std::vector<CatalogBranch> branches;
};

/// All entries, ordered dP1..dP5.  Built once, shareable, never mutated.
const std::vector<CatalogEntry>& catalog_entries();

/// Lookup; throws ValidationError for an unknown id / branch.
const CatalogEntry& catalog_get(const std::string& id);
const CatalogBranch& catalog_get_branch(const std::string& id, const std::string& branch);

/// One row of the list() summary.
struct CatalogSummaryRow {
    std::string id;
    std::string branch;
    std::size_t generator_count = 0;
    std::size_t solution_count = 0;
    std::string equation_text;
};

/// Stable-order summary (entries in dP1..dP5 order, branches in listed order).
std::vector<CatalogSummaryRow> catalog_list();

/// JSON export of one entry, or of a single branch when `branch` is
/// non-empty.  Generators and equations are embedded with the same schemas
/// the rest of the library emits (generator_to_json / equation_to_json).
std::string catalog_export_json(const std::string& id, const std::string& branch = "");

/// Instantiate a branch equation, optionally refining it with extra
/// assumptions over the family parameters.  Extras that contradict the
/// branch (e.g. "b!=a*d" against the reciprocal case of dP3) are rejected
/// via check_assumption_consistency; extras mentioning only parameters that
/// survive in the branch equation are appended to its assumption list.
DifferenceEquation catalog_instantiate(const std::string& id, const std::string& branch,
                                       const std::vector<std::string>& extra_assumptions = {});

}  // namespace dpsym
