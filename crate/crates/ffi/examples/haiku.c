/* Prints three haikus as JSON.
 *
 *   cargo build -p renga-ffi
 *   cc crates/ffi/examples/haiku.c -Icrates/ffi/include \
 *      target/debug/librenga_ffi.a -lpthread -ldl -lm -o haiku
 *   ./haiku models
 */
#include <stdio.h>
#include "renga.h"

int main(int argc, char **argv) {
    RengaEngine *engine = NULL;
    char *out = NULL;
    if (argc < 2) {
        fprintf(stderr, "usage: %s MODEL_DIR\n", argv[0]);
        return 2;
    }
    if (renga_engine_load(argv[1], &engine) != RENGA_STATUS_OK) {
        fprintf(stderr, "%s\n", renga_last_error());
        return 1;
    }
    RengaStatus st = renga_generate_json(engine, "{\"prompts\": [\"frog pond\", \"moon\"], \"n\": 3, \"seed\": 7}", &out);
    if (st != RENGA_STATUS_OK) {
        fprintf(stderr, "%s\n", renga_last_error());
        renga_engine_free(engine);
        return 1;
    }
    printf("%s\n", out);
    renga_string_free(out);
    renga_engine_free(engine);
    return 0;
}
