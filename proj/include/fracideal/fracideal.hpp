#pragma once

#include "error.hpp"
#include "rational.hpp"
#include "rtilde.hpp"
#include "value_group.hpp"
#include "tower.hpp"
#include "uscfn.hpp"
#include "ideal.hpp"
#include "classgrp.hpp"
#include "galois.hpp"
#include "io.hpp"
