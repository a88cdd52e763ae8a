/*
 * Copyright 2026 The casimir-workbench developers
 *
 *      Licensed under the Apache License, Version 2.0 (the "License")
 *
 * You may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *              http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include <stdio.h>

#include "casimir.h"

int main(void) {
  double x = 0.0;
  if (csm_electrostatic_kernel(100.0, 101.2, CSM_KERNEL_POLYNOMIAL, &x) != CSM_OK) return 1;
  if (!(x < 0.0)) return 1;
  csm_config* cfg = NULL;
  if (csm_config_load("/nonexistent.cfg", &cfg) != CSM_ERR_VALIDATION) return 1;
  if (csm_last_error()[0] == '\0') return 1;
  int ok = 0;
  if (csm_table_consistent(&ok) != CSM_OK || ok != 1) return 1;
  printf("X(100 nm) = %.3f pN/V^2\n", x);
  return 0;
}
