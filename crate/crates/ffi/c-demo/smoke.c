#include <assert.h>
#include <stdio.h>
#include <string.h>
#include "linematch.h"

int main(void) {
    printf("linematch %s\n", lm_version());

    LmInstance *inst = NULL;
    const char *json = "{\"servers\": [0.0, 4.0, 11.0, 31.0], \"requests\": [4.0, 4.0, 4.0, 0.0]}";
    assert(lm_instance_parse(json, true, &inst) == LM_STATUS_OK);

    size_t n = 0;
    assert(lm_instance_server_count(inst, &n) == LM_STATUS_OK && n == 4);

    uint32_t algo = 99;
    assert(lm_algorithm_code("mdh", &algo) == LM_STATUS_OK && algo == 3);

    LmTranscript *t = NULL;
    assert(lm_run(inst, algo, 42, 0, &t) == LM_STATUS_OK);
    double total = -1, opt = -1, ratio = -1;
    assert(lm_transcript_total_cost(t, &total) == LM_STATUS_OK);
    assert(lm_transcript_opt_cost(t, &opt) == LM_STATUS_OK);
    assert(lm_transcript_ratio(t, &ratio) == LM_STATUS_OK);
    printf("total = %g, opt = %g, ratio = %g\n", total, opt, ratio);
    assert(total >= opt - 1e-9);

    char *body = NULL;
    assert(lm_transcript_json(t, &body) == LM_STATUS_OK);
    assert(strstr(body, "\"algorithm\": \"mdh\"") != NULL);
    lm_string_free(body);

    char *ce = NULL;
    assert(lm_counterexample_json(&ce) == LM_STATUS_OK);
    assert(strstr(ce, "\"pass\": true") != NULL);
    lm_string_free(ce);

    lm_transcript_free(t);
    lm_instance_free(inst);
    puts("ffi smoke: OK");
    return 0;
}
