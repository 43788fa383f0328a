import { mountApp } from "./app.js";

const app = mountApp(document);
void app.start();
