#pragma once

#include "mixfid/blocks.hpp"
#include "mixfid/channels.hpp"
#include "mixfid/errors.hpp"
#include "mixfid/fidelity.hpp"
#include "mixfid/fits.hpp"
#include "mixfid/geometry.hpp"
#include "mixfid/matcore.hpp"
#include "mixfid/observables.hpp"
#include "mixfid/proxies.hpp"
#include "mixfid/state_io.hpp"
#include "mixfid/states.hpp"
#include "mixfid/system.hpp"
