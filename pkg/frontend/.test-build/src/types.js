/** Wire types of the ranking/grid JSON API. */
export {};
