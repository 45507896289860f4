/*
 * Pure C translation unit: proves poroplate.h compiles as C and the
 * session surface links and behaves across the C boundary.
 */
#include <stdio.h>
#include <string.h>

#include "poroplate/poroplate.h"

static int failures = 0;

static void expect(int cond, const char* what) {
  if (!cond) {
    fprintf(stderr, "FAIL: %s\n", what);
    ++failures;
  }
}

int main(void) {
  expect(strcmp(poroplate_version(), "1.0.0") == 0, "version string");
  expect(strcmp(poroplate_status_name(POROPLATE_OK), "POROPLATE_OK") == 0,
         "status name");

  poroplate_session* s = NULL;
  poroplate_status st = poroplate_session_create_from_text(&s, "D 1.0\n");
  expect(st == POROPLATE_ERR_PARSE, "malformed text reports a parse error");
  expect(s == NULL, "no session on failure");
  expect(poroplate_last_error()[0] != '\0', "thread error message set");

  st = poroplate_session_create_from_text(&s, "mode = quasistatic\n");
  expect(st == POROPLATE_OK, "valid text creates a session");
  expect(s != NULL, "session handle set");
  expect(poroplate_session_set_override(s, "tau", "0.5") == POROPLATE_OK,
         "override accepted");
  expect(poroplate_session_set_override(s, "warp", "9") ==
             POROPLATE_ERR_SCHEMA,
         "unknown override key rejected");
  expect(poroplate_session_set_quiet(s, 1) == POROPLATE_OK, "quiet settable");
  expect(poroplate_session_summary(s)[0] == '\0', "summary empty before run");
  poroplate_session_destroy(s);
  poroplate_session_destroy(NULL);

  if (failures == 0) puts("capi_c_smoke: all checks passed");
  return failures == 0 ? 0 : 1;
}
