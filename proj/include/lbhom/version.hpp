#pragma once

#define LBHOM_VERSION "0.1.0"
