/** The application index page: browse, filter by tag, text search.
 * No login is required for anything here; filters re-query the server. */

import type { HubClient } from "./api.js";
import type { ApplicationSummary } from "./types.js";

export interface IndexModel {
  entries: ApplicationSummary[];
  tagFilter: string;
  textQuery: string;
  empty: boolean;
  serverUnreachable: boolean;
}

export async function loadIndex(
  client: HubClient,
  tagFilter = "",
  textQuery = "",
): Promise<IndexModel> {
  try {
    const entries = await client.listApplications({
      tag: tagFilter || undefined,
      q: textQuery || undefined,
    });
    return {
      entries,
      tagFilter,
      textQuery,
      empty: entries.length === 0,
      serverUnreachable: false,
    };
  } catch (error) {
    if (error instanceof TypeError) {
      // network-level failure: fetch rejects with TypeError
      return { entries: [], tagFilter, textQuery, empty: true, serverUnreachable: true };
    }
    throw error;
  }
}
