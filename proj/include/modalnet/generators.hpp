#pragma once

#include <cstdint>
#include <random>

#include "modalnet/algebra.hpp"

// Seeded generators of small finite objects for the law suites. Every
// generated port type is finite, so everything built here can be checked
// exhaustively.
namespace mnet::gen {

using Rng = std::mt19937_64;

struct Limits {
  std::size_t max_ports = 3;   // per side of a box
  std::size_t max_modes = 3;
  std::size_t max_states = 6;
};

// unit, bit, enum(u, v) or enum(u, v, w), int(0, 2)
ValueType finite_type(Rng& rng);
TypedFinSet typed_set(Rng& rng, const Limits& lim, const char* prefix);
Box box(Rng& rng, const Limits& lim);

// A random diagram out of x into a fresh target box. Inner inputs draw from
// new or shared outer inputs or from inner outputs; outer outputs draw from
// inner outputs.
WiringDiagram diagram_from(Rng& rng, const Box& x, const Limits& lim);

// Atomic modal box with 1..max_modes modes.
ModalBox modal_box(Rng& rng, const Limits& lim);
// A random morphism out of `source` into a fresh atomic modal box.
MdnMorphism morphism_from(Rng& rng, const ModalBox& source, const Limits& lim);

// Finite-state system with tabulated mode map and readout and a hashed
// update; deterministic for a given rng state.
ModalDynamicalSystem system_over(Rng& rng, const ModalBox& over, const Limits& lim);

}  // namespace mnet::gen
