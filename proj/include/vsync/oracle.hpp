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

#include <cstdint>
#include <optional>
#include <vector>

#include "vsync/sync.hpp"
#include "vsync/wsmkb.hpp"
#include "vsync/wsvkb.hpp"

namespace vsync::oracle {

/// Bounds on generated universes. The generator also keeps every relation
/// at >= 2 attributes and binds a relation at most once per FROM, so a
/// single deletion can never empty a relation and every rewrite touches a
/// single binding.
struct InstanceSpec {
    int max_sources = 3;
    int max_relations_per_source = 3;
    int max_attributes_per_relation = 4;
    int max_join_constraints = 6;
    int max_pc_constraints = 4;
    int max_views = 3;
    int max_clauses_per_view = 3;

    void validate() const; // throws InvariantViolation unless all positive
};

struct Instance {
    wsmkb::Store mkb;
    wsvkb::Store vkb;
    ChangeEvent event;
};

/// Deterministic in seed; the instance satisfies all store invariants and
/// the event targets an existing component.
Instance generate_instance(std::uint64_t seed, const InstanceSpec& spec = {});

struct OutcomeSet {
    /// Every outcome reachable by some candidate choice, validated against
    /// the replacement predicates, cascade rules, and VE compatibility;
    /// contains Failed iff no legal rewrite exists and the branch mandates
    /// failure. Deduplicated, deterministic order.
    std::vector<sync::ViewOutcome> outcomes;
    /// Index of the outcome the documented ranking selects.
    std::size_t best = 0;
};

/// Exhaustive independent re-implementation of the rewrite legality rules;
/// shares only the model and esql modules with the engine. The store is
/// the pre-event state. Throws BoundsExceeded outside InstanceSpec bounds.
OutcomeSet enumerate_outcomes(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                              const ChangeEvent& event, const InstanceSpec& spec = {});

} // namespace vsync::oracle
