#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modalnet/sim.hpp"

// Module-built versions of the shipped networks: the retinal nerve, the eye,
// the blinking eye pair, feedforward layers of neurons and the visual system.
// Each mirrors one .mdn document in fixtures/.
namespace mnet::fixtures {

// `name[0]`, ..., `name[width-1]`
std::vector<Port> bus(const std::string& name, std::size_t width, const ValueType& type);
Box make_box(std::vector<Port> inputs, std::vector<Port> outputs);

struct NerveParams {
  double alpha = 0.5;  // firing threshold
  double beta = 2.0;   // adaptation constant
  bool readout_on_depolarized = false;
};

// Light and adaptation on the grid {0, ..., levels} (quarters by default),
// arithmetic floored and saturated.
struct DiscreteNerveParams {
  std::int64_t levels = 4;
  std::int64_t alpha = 2;
  std::int64_t beta = 2;
  bool readout_on_depolarized = false;
};

struct Retina {
  ModalBox n;  // nerve: polarized has the light input, the other modes none
  ModalBox r;  // mode-independent wrapper
  MdnMorphism nerve;
  ModalDynamicalSystem dynamics;
  NetworkNode network;  // Nerve applied to the nerve dynamics
};

Retina retina(const NerveParams& p = {});
Retina retina_discrete(const DiscreteNerveParams& p = {});

struct Eye {
  Retina retina;
  ModalBox e;
  MdnMorphism eye;  // (R, ..., R) -> E
  NetworkNode network;
};

Eye eye(std::size_t width = 3, const DiscreteNerveParams& p = {});

struct BlinkParams {
  std::size_t width = 3;
  double threshold = 0.5;
  DiscreteNerveParams nerve{4, 2, 2, true};
};

struct Blink {
  Retina retina;
  ModalBox lid, e, p, b;
  MdnMorphism eye;    // (Lid, R, ..., R) -> E, E open or shut with the lid
  MdnMorphism blink;  // (E, E, P) -> B
  ModalDynamicalSystem lid_dynamics, pons_dynamics;
  NetworkNode network;
};

Blink blink(const BlinkParams& p = {});

struct LayersParams {
  std::size_t inputs = 4;   // width of the first layer's input bus
  std::size_t neurons = 2;  // neurons per layer
  double alpha = 0.5;
  bool readout_on_depolarized = false;
};

struct Layers {
  ModalBox sum_wide, sum_narrow, soma, rn_wide, rn_narrow, l_wide, l_narrow, v;
  MdnMorphism neuron_wide, neuron_narrow, layer_wide, layer_narrow, v_net;
  ModalDynamicalSystem sum_wide_dynamics, sum_narrow_dynamics, soma_dynamics;
  NetworkNode network;  // V . (layer, layer, layer) . neurons
};

Layers layers(const LayersParams& p = {});

struct VisualSystemParams {
  std::size_t width = 2;    // nerves per eye
  std::size_t neurons = 2;  // neurons per layer
  double threshold = 0.5;
  double alpha = 0.5;
};

struct VisualSystem {
  Blink blink;
  Layers layers;
  ModalBox vs;
  MdnMorphism vs_net;  // (B, V) -> VS
  NetworkNode network;
};

VisualSystem visual_system(const VisualSystemParams& p = {});

// Subtrees shared by the composite networks.
NetworkNode blink_network(const Blink& b);
NetworkNode layers_network(const Layers& l);

}  // namespace mnet::fixtures
