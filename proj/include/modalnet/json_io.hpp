#pragma once

#include <cstddef>
#include <string>

#include "json.hpp"
#include "modalnet/sim.hpp"

// JSON forms of the core values. Objects keep insertion order, and every
// writer inserts keys in canonical order, so output is byte-stable.
namespace mnet::json {

using Json = nlohmann::ordered_json;

Json from_type(const ValueType& t);
ValueType to_type(const Json& j);

// Unit is null, integers and reals are numbers, symbols strings, tuples arrays.
Json from_value(const Value& v);
// Untyped reading: integral numbers become integers, other numbers reals.
Value to_value(const Json& j);
// Reads against a type, coercing integers into real-valued types.
Value to_value(const Json& j, const ValueType& t);

Json from_set(const TypedFinSet& s);
TypedFinSet to_set(const Json& j);
Json from_function(const TypedFunction& f);
TypedFunction to_function(const Json& j);
Json from_assignment(const Assignment& a);
Assignment to_assignment(const Json& j, const TypedFinSet& over);

Json from_box(const Box& b);
Box to_box(const Json& j);
Json from_diagram(const WiringDiagram& d);
WiringDiagram to_diagram(const Json& j);
Json from_arrow(const OperadArrow& a);

Json from_modal_box(const ModalBox& m);
ModalBox to_modal_box(const Json& j);
// At most `max_events` events are written; "truncated" says whether any
// were left out.
Json from_morphism(const MdnMorphism& f, std::size_t max_events = SIZE_MAX);
MdnMorphism to_morphism(const Json& j);

Json from_state_space(const StateSpace& s);
// Records are objects keyed by field, products arrays of component states,
// finite states their symbol.
Json from_state(const StateSpace& s, const Value& v);
Value to_state(const StateSpace& s, const Json& j);

Json from_trace_step(const StateSpace& s, const TraceStep& t);
// One JSON object of port values per line; blank lines are skipped.
InputTrace parse_input_trace(const std::string& text);

}  // namespace mnet::json
