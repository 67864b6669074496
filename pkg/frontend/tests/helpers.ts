export const BASE_URL = `http://127.0.0.1:${Number(process.env.BIOINVERT_UI_TEST_PORT ?? 8231)}`;
