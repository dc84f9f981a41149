#pragma once

#include "fanstate/closed_form.hpp"
#include "fanstate/error.hpp"
#include "fanstate/fock_oracle.hpp"
#include "fanstate/moments.hpp"
#include "fanstate/nonlinearity.hpp"
#include "fanstate/signed_log.hpp"
#include "fanstate/squeezing.hpp"
