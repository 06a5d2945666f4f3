/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "vsync/esql/ast.hpp"
#include "vsync/model.hpp"
#include "vsync/wsmkb.hpp"
#include "vsync/wsvkb.hpp"

namespace vsync::sync {

inline constexpr const char* kFailureMessage = "Web service can't be synchronized";

struct Unchanged {
    bool operator==(const Unchanged&) const = default;
};

struct Rewritten {
    esql::ViewDefinition view;
    ExtentRelation extent = ExtentRelation::Equivalent;
    std::vector<std::string> dropped; // component descriptions, in drop order

    bool operator==(const Rewritten&) const = default;
};

struct Failed {
    std::string message = kFailureMessage;
    bool operator==(const Failed&) const = default;
};

using ViewOutcome = std::variant<Unchanged, Rewritten, Failed>;

/// Per-web-service status when at least one of its views failed; carries
/// the advisory replacement pick, if any. Never mutates the stores.
struct WsFailure {
    std::optional<std::string> fallback;
    bool operator==(const WsFailure&) const = default;
};

using WsOutcome = std::variant<ExtentRelation, WsFailure>;

struct SyncReport {
    ChangeEvent event;
    std::map<std::string, ViewOutcome> per_view;
    std::map<std::string, WsOutcome> per_ws;
};

// ---------------------------------------------------------------------
// Extent classification
// ---------------------------------------------------------------------

enum class RewriteKind { None, RelationSubstitution, AttributeSubstitution };

struct DroppedComponents {
    int select_items = 0;
    int where_clauses = 0;
    int from_items = 0;
};

/// Lattice meet used to combine per-step extents: ≡ is the identity,
/// ≈ absorbs everything, ⊇ and ⊆ combine to ≈.
ExtentRelation compose_extents(ExtentRelation a, ExtentRelation b);

/// Extent of substituting relation R by S where R theta S holds:
/// ≡ → ≡, R⊆S → ⊇, R⊇S → ⊆.
ExtentRelation relation_substitution_extent(ExtentRelation theta);

/// Extent of keeping R and joining in S under PC theta (oriented R theta S):
/// ≡ or R⊆S → ≡, R⊇S → ⊆, no PC → ≈.
ExtentRelation attribute_substitution_extent(std::optional<ExtentRelation> theta);

/// Deterministic extent of one rewrite step: the substitution extent (per
/// kind and theta) composed with the drop contributions (select item → ≈,
/// where clause → ⊇, from item → ⊇).
ExtentRelation classify_extent(RewriteKind kind, std::optional<ExtentRelation> theta,
                               const DroppedComponents& dropped);

/// VE acceptance: ≡ accepts {≡}; ⊇ accepts {≡,⊇}; ⊆ accepts {≡,⊆};
/// ≈ accepts all four.
bool ve_compatible(ExtentRelation ve, ExtentRelation extent);

/// Web-service-level extent from its views' extents: all ≡ → ≡; any ≈ or
/// both directions present → ≈; otherwise the single direction present.
ExtentRelation classify_ws(const std::vector<ExtentRelation>& view_extents);

// ---------------------------------------------------------------------
// Rewrite operations (pure over store snapshots)
// ---------------------------------------------------------------------

/// Web services whose views reference the target.
std::set<std::string> search_affected(const wsmkb::Store& mkb, const wsvkb::Store& vkb,
                                      const AttributeRef& target);
std::set<std::string> search_affected(const wsmkb::Store& mkb, const wsvkb::Store& vkb,
                                      const RelationRef& target);

/// Applies the RD/RR branches for a deleted relation the view lists in
/// FROM: drop, substitute-else-drop, fail, substitute-else-fail.
ViewOutcome rewrite_view_for_relation(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                                      const RelationRef& relation);

/// Applies the AD/AR branches for a deleted attribute the view mentions.
/// Attributes appearing only in WHERE dispatch on the first containing
/// clause's (CD, CR).
ViewOutcome rewrite_view_for_attribute(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                                       const AttributeRef& attribute);

/// Best legal substitute relation for `relation` in this view, or nothing.
/// Candidates whose substitution cannot produce a VE-compatible rewrite
/// are skipped; survivors are ranked by implied extent (≡ first, then the
/// VE's own direction), tie-broken by (source_id, relation_name).
std::optional<std::pair<RelationRef, ExtentRelation>>
find_relation(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
              const RelationRef& relation);

/// True iff `substitute` can stand in for `relation` in this view: every
/// indispensable occurrence has a counterpart (identical name for
/// non-replaceable occurrences, name-or-JC for replaceable ones, same
/// declared type), dispensable occurrences without a counterpart are
/// droppable, and the composed extent is VE-compatible.
bool relation_replaces(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                       const RelationRef& relation, const RelationRef& substitute,
                       ExtentRelation theta);

/// Rebinds every alias of `relation` to `substitute` under a fresh alias,
/// rewriting SELECT/WHERE occurrences through the name/JC correspondence.
/// Pre: relation_replaces holds.
esql::ViewDefinition substitute_relation(const wsmkb::Store& mkb,
                                         const esql::ViewDefinition& view,
                                         const RelationRef& relation,
                                         const RelationRef& substitute);

/// Best legal substitute attribute, or nothing. Same filtering and
/// ranking contract as find_relation, tie-broken by the full
/// (source_id, relation_name, attribute_name) triple.
std::optional<AttributeRef> find_attribute(const wsmkb::Store& mkb, const AttributeRef& attribute,
                                           const esql::ViewDefinition& view);

/// True iff the attributes have the same declared type and a registered
/// JC equality links them (either orientation).
bool attribute_replaces(const wsmkb::Store& mkb, const AttributeRef& attribute,
                        const AttributeRef& substitute);

/// Substitutes attribute `a` by `b`: rewrites SELECT occurrences onto a
/// fresh alias of b's relation, adds that relation to FROM with a linking
/// join clause, and applies the CD/CR branches to WHERE occurrences.
/// Failure (a non-replaceable, non-dispensable clause) is an outcome.
ViewOutcome substitute_attribute(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                                 const AttributeRef& attribute, const AttributeRef& substitute);

/// First replacement-chain entry whose own views are all currently valid.
/// Throws UnknownWebService if ws_id is not registered.
std::optional<std::string> fallback_web_service(const wsmkb::Store& mkb, const wsvkb::Store& vkb,
                                                const std::string& ws_id);

/// Dispatches the event, rewrites every affected view, updates both
/// stores (post-event schemas, rewritten definitions, validity marks) and
/// aggregates per-view and per-web-service outcomes. The only mutating
/// entry point; callers serialize events externally.
SyncReport synchronize(wsmkb::Store& mkb, wsvkb::Store& vkb, const ChangeEvent& event);

} // namespace vsync::sync
