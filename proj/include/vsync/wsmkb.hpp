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
#include <vector>

#include "vsync/esql/ast.hpp"
#include "vsync/model.hpp"

namespace vsync::wsmkb {

/// Declares the domain type of every attribute of one relation.
struct TypeIntegrityConstraint {
    RelationRef relation;
    std::map<std::string, TypeDomain> typing; // covers exactly the schema attributes

    bool operator==(const TypeIntegrityConstraint&) const = default;
};

/// Declares that two relations can be joined via a conjunction of
/// attribute equalities. Equalities are symmetric.
struct JoinConstraint {
    RelationRef left;
    RelationRef right;
    std::vector<std::pair<std::string, std::string>> equalities; // nonempty

    bool operator==(const JoinConstraint&) const = default;
};

/// One side of a partial/complete constraint: a projection of a relation,
/// optionally restricted by a selection conjunction. Selection clauses use
/// the relation name as the attribute alias.
struct PCSide {
    RelationRef relation;
    std::vector<std::string> projection; // nonempty
    std::vector<esql::PrimitiveClause> selection;

    bool operator==(const PCSide&) const = default;
};

/// Containment between two (possibly restricted) projections.
/// theta is one of Subset, Superset, Equivalent.
struct PCConstraint {
    PCSide left;
    ExtentRelation theta = ExtentRelation::Equivalent;
    PCSide right;

    bool operator==(const PCConstraint&) const = default;
    bool projection_only() const { return left.selection.empty() && right.selection.empty(); }
};

/// Ordered list of web services that may stand in for ws_id.
struct ReplacementRule {
    std::string ws_id;
    std::vector<std::string> substitutes;

    bool operator==(const ReplacementRule&) const = default;
};

/// Web services Meta Knowledge Base: source schemas, substitution
/// constraints (TC/JC/PC), WS->source maps and replacement rules.
///
/// Value semantics; copying a store takes the snapshot readers work on.
/// A single writer mutates via add()/apply_event().
class Store {
  public:
    // Registration. Duplicate registration of an identical item is a
    // no-op. Throws DanglingReference when a referenced component is not
    // registered, InvariantViolation when a constraint invariant fails.
    void add(const SourceSchema& source);
    void add(const TypeIntegrityConstraint& tc);
    void add(const JoinConstraint& jc);
    void add(const PCConstraint& pc);
    void add(const WebService& ws);
    void add(const ReplacementRule& rule);

    /// Applies a deletion event to the registered schemas. Constraints
    /// referencing deleted components are kept but ignored by the
    /// candidate queries. Throws UnknownTarget.
    void apply_event(const ChangeEvent& event);

    /// Declared domain of an attribute per its type-integrity constraint.
    /// Throws UnknownAttribute if no TC covers it.
    TypeDomain attribute_type(const AttributeRef& attribute) const;

    /// Every attribute linked to `attribute` by a registered JC equality
    /// (either orientation) with an identical declared type, excluding
    /// `attribute` itself and attributes no longer present in the schemas.
    std::set<AttributeRef> candidate_substitute_attributes(const AttributeRef& attribute) const;

    /// Every relation linked to `relation` by a projection-only PC, with
    /// theta oriented from `relation`'s side, excluding relations no
    /// longer present in the schemas.
    std::set<std::pair<RelationRef, ExtentRelation>>
    candidate_substitute_relations(const RelationRef& relation) const;

    /// The stored preference-ordered replacement list (possibly empty).
    /// Throws UnknownWebService.
    const std::vector<std::string>& replacement_chain(const std::string& ws_id) const;

    // Lookups.
    const SchemaSet& schemas() const { return schemas_; }
    const SourceSchema* find_source(const std::string& source_id) const;
    const RelationSchema* find_relation(const RelationRef& relation) const;
    bool has_relation(const RelationRef& relation) const;
    bool has_attribute(const AttributeRef& attribute) const;
    const WebService* find_web_service(const std::string& ws_id) const;

    // Raw constraint access (deterministic registration order) for
    // independent re-implementations and reporting.
    const std::vector<JoinConstraint>& join_constraints() const { return jcs_; }
    const std::vector<PCConstraint>& pc_constraints() const { return pcs_; }
    const std::map<RelationRef, TypeIntegrityConstraint>& type_constraints() const { return tcs_; }
    const std::map<std::string, WebService>& web_services() const { return web_services_; }

    size_t source_count() const { return schemas_.size(); }
    size_t tc_count() const { return tcs_.size(); }
    size_t jc_count() const { return jcs_.size(); }
    size_t pc_count() const { return pcs_.size(); }
    size_t web_service_count() const { return web_services_.size(); }

  private:
    void validate_constraint(const TypeIntegrityConstraint& tc) const;
    void validate_constraint(const JoinConstraint& jc) const;
    void validate_constraint(const PCConstraint& pc) const;

    SchemaSet schemas_;
    std::map<RelationRef, TypeIntegrityConstraint> tcs_;
    std::vector<JoinConstraint> jcs_;
    std::vector<PCConstraint> pcs_;
    std::map<std::string, WebService> web_services_;
    std::map<std::string, std::vector<std::string>> replacements_;
};

} // namespace vsync::wsmkb
