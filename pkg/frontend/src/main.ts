import { ApiClient } from "./api";
import { Dashboard } from "./app";

declare global {
  interface Window {
    ENROLLCAST_API_BASE?: string;
  }
}

const root = document.getElementById("app");
if (root) {
  // same-origin by default (the service mounts the built dashboard at /app)
  const api = new ApiClient(window.ENROLLCAST_API_BASE ?? "");
  new Dashboard(api, root).start();
}
