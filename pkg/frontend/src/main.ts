import { ApiClient } from './api';
import { Wizard } from './wizard';

function baseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get('api') ?? 'http://127.0.0.1:8000';
}

function boot(): void {
  const root = document.getElementById('app');
  if (!root) return;
  const api = new ApiClient(baseUrl());
  const wizard = new Wizard(
    root.querySelector<HTMLElement>('#wizard') ?? root,
    api
  );

  const launcher = document.getElementById('launcher');
  if (launcher) {
    launcher.addEventListener('submit', (event) => {
      event.preventDefault();
      const patient = launcher.querySelector<HTMLInputElement>('#patient-id');
      const resume = launcher.querySelector<HTMLInputElement>('#session-id');
      if (resume && resume.value) {
        void wizard.resume(resume.value.trim());
      } else if (patient && patient.value) {
        void wizard.start(patient.value.trim());
      }
    });
  }
}

document.addEventListener('DOMContentLoaded', boot);
